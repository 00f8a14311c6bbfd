use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum BroxError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("infeasible subproblem: {0}")]
    Infeasible(String),
    #[error("unknown catalog entry `{0}`")]
    Catalog(String),
    #[error("finite-difference stencil left the domain at {0:?}")]
    DomainBoundary(Vec<f64>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, BroxError>;

pub(crate) fn invalid(msg: impl Into<String>) -> BroxError {
    BroxError::InvalidArgument(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(BroxError::DimensionMismatch { expected, got })
    }
}
