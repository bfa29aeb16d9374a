use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 16")]
    InvalidGridSize(usize),

    #[error("half-period must be positive and finite, got {0}")]
    InvalidHalfLength(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not enough records for the fit: need {needed}, have {have}")]
    InsufficientRecords { needed: usize, have: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
