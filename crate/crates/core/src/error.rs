use thiserror::Error;

/// Errors raised by the chain library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("size error: {0}")]
    Size(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing dependency: {0}")]
    Dependency(String),

    #[error("unsupported dimension {dim} (expected {expected})")]
    UnsupportedDimension { dim: usize, expected: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("internal solver error: {0}")]
    Internal(String),

    #[error("constraint violated: {0}")]
    Constraint(String),
}

pub type Result<T> = std::result::Result<T, ChainError>;
