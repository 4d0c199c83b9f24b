//! Error type shared across the pipeline stages.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CadError {
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("input too small: {0}")]
    TooSmall(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("graph is disconnected between requested endpoints")]
    Disconnected,
    #[error("manifest error at line {line}: {msg}")]
    Manifest { line: usize, msg: String },
    #[error("image error: {0}")]
    Image(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CadError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CadError::InvalidParam(msg.into())
    }

    /// Process exit code contract: 1 for input errors, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CadError::NonFinite(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CadError>;
