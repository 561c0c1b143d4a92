//! Nonequilibrium steady states of boundary-driven tilted interacting fermion chains.

pub mod ansatz;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod mesoleads;
pub mod model;
pub mod noninteracting;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{FockBasis, ModelParams};
pub use scalar::{BigReal, DoubleDouble, Real, Scalar};
