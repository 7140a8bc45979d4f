use thiserror::Error;

/// Errors raised by the analysis and estimation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("ill-conditioned {what}: condition estimate {condition:.3e} exceeds {threshold:.3e}")]
    Conditioning {
        what: String,
        condition: f64,
        threshold: f64,
    },

    #[error("atypical instance: {0}")]
    Atypical(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
