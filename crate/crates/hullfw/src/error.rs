use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for SolverError {
    fn from(e: serde_json::Error) -> Self {
        SolverError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SolverError>;
