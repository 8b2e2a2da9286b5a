//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SkimError {
    /// A parameter is outside its valid domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Dimensions of two inputs do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A data file could not be parsed.
    #[error("parse error at {path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    /// A NaN or infinity appeared where a finite value is required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// The operation is not defined for the given input.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SkimError {
    pub(crate) fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        SkimError::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn shape(reason: impl Into<String>) -> Self {
        SkimError::Shape(reason.into())
    }
}

pub type Result<T> = std::result::Result<T, SkimError>;
