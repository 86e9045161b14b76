use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("matrix is not Hermitian: |M - M^H|_F = {deviation:e} exceeds {threshold:e}")]
    NotHermitian { deviation: f64, threshold: f64 },

    #[error("tolerance {tol:e} not reached within {budget} series terms")]
    ToleranceNotReached { tol: f64, budget: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state does not have unit norm (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("outcome {0} is not in the spectrum")]
    OutcomeNotInSpectrum(f64),

    #[error("negative probability {0:e} exceeds rounding tolerance")]
    NegativeProbability(f64),

    #[error("truncation K = {dim} too small: tail mass {tail_mass:e} exceeds {tolerance:e}")]
    TruncationInsufficient {
        dim: usize,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("route mismatch: residual {residual:e} exceeds {threshold:e}")]
    RouteMismatch { residual: f64, threshold: f64 },

    #[error("insufficient quadrature: {0}")]
    InsufficientQuadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
