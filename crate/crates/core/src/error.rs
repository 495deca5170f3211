use thiserror::Error;

/// Errors produced by model evaluation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("x = {x} is outside the privacy interval [{min}, {max}]")]
    OutOfDomain { x: f64, min: f64, max: f64 },

    #[error("model does not provide a derivative (custom model without a slope evaluator)")]
    SlopeUnavailable,

    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),

    #[error("evaluator returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("model spec failed validation: {0}")]
    InvalidSpec(String),

    #[error("prior p = {0} must lie strictly inside (0, 1)")]
    BadPrior(f64),

    #[error("operation requires an active risk model")]
    RiskInactive,

    #[error("operation requires a second-best report")]
    NotSecondBest,

    #[error("bad grid: {0}")]
    BadGrid(String),

    #[error("{0}")]
    Argument(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
