use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid cone order: {0}")]
    InvalidConeOrder(String),
    #[error("formula inapplicable: {0}")]
    FormulaInapplicable(String),
    #[error("index undefined: {0}")]
    UndefinedIndex(String),
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
    #[error("resource cap exceeded: {required} cells required, cap is {cap}")]
    Resource { cap: u64, required: u64 },
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Re-roots a validation error under `prefix`; other variants are wrapped.
    pub fn at(self, prefix: &str) -> Self {
        match self {
            Error::Validation { path, message } => {
                let path = if path.is_empty() {
                    prefix.to_string()
                } else if path.starts_with('[') {
                    format!("{prefix}{path}")
                } else {
                    format!("{prefix}.{path}")
                };
                Error::Validation { path, message }
            }
            other => Error::Validation {
                path: prefix.to_string(),
                message: other.to_string(),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
