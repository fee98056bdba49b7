use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: {0} vs {1}")]
    Arity(usize, usize),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("dimension mismatch: {0}")]
    Dims(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
