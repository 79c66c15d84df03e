use thiserror::Error;

#[derive(Debug, Error)]
pub enum KacError {
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integral computation failed: {0}")]
    Integral(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("axiom failure: {0}")]
    Axioms(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, KacError>;
