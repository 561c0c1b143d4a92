use thiserror::Error;

/// Errors raised by the model builders and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("basis has {basis} sites but the model has {model}")]
    DimensionMismatch { basis: usize, model: usize },

    #[error("chemical potential {mu} is not the CP-symmetric value {expected} (= -E(N+1)/4)")]
    NotCpSymmetric { mu: f64, expected: f64 },

    #[error("perturbative denominator {name} = {value:e} is within {tolerance:e} of a pole")]
    Pole {
        name: &'static str,
        value: f64,
        tolerance: f64,
    },

    #[error("system of {sites} sites exceeds the {backend} backend limit of {limit} sites")]
    TooLarge {
        sites: usize,
        limit: usize,
        backend: &'static str,
    },

    #[error("eigensolver failed at tilt E = {tilt}: {reason}")]
    Eigensolver { tilt: f64, reason: String },

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("steady state is not unique: numerical null space of dimension {dimension}")]
    DegenerateSteadyState { dimension: usize },

    #[error("steady-state solve did not converge: residual {residual:e} above {tolerance:e}")]
    NotConverged { residual: f64, tolerance: f64 },

    #[error("eigenbasis is not orthonormal: Gram residual {residual:e}")]
    NotOrthonormal { residual: f64 },

    #[error("requested expansion order {requested} exceeds the implemented maximum {max}")]
    UnsupportedOrder { requested: u32, max: u32 },

    #[error("ansatz undefined for Δ = E = 0: the spectrum is gapless")]
    Gapless,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
