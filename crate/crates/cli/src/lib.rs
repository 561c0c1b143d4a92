//! Configuration, sweeps and reports on top of the `tiltdiode` solvers.

pub mod analysis;
pub mod config;
pub mod error;
pub mod sweep;

pub use config::{Solver, SweepConfig};
pub use error::{CliError, Result};
pub use sweep::{run_and_summarize, RunOptions, Summary, Sweep};
