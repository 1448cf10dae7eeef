use thiserror::Error;

/// Errors produced by the numerical kernel and the channel/entanglement layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("entry count {len} does not match dimension {dim} (need {dim}^2)")]
    BadShape { dim: usize, len: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("Bloch vector norm {0} exceeds 1 (unphysical state)")]
    UnphysicalBloch(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("map is not completely positive (Choi min eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("entanglement-breaking onset is not monotone on [0, {t_max}]: verdict reverts near t = {at}")]
    NonMonotoneOnset { t_max: f64, at: f64 },

    #[error(
        "the six prepared states do not exist: coefficient 3·exp(-t/tau) = {coefficient} exceeds 1"
    )]
    HolevoStatesDoNotExist { coefficient: f64 },

    #[error("zero standard error with nonzero deviation at t = {0}")]
    ZeroStderr(f64),

    #[error("standard error undefined for an ensemble of one trajectory")]
    StderrUndefined,
}

pub type Result<T> = std::result::Result<T, Error>;
