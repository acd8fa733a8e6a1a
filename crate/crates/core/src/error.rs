//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the numeric core.
#[derive(Debug, Error)]
pub enum Error {
    /// A spec or config field violated its stated bounds.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Vector/matrix shapes do not line up.
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    /// An operation needs more data than the caller supplied.
    #[error("not enough data: {0}")]
    NotEnoughData(String),

    /// Training produced a non-finite parameter or gradient.
    #[error("non-finite value encountered during {0}")]
    NonFinite(&'static str),

    /// Reconstruction error blew past the divergence guard.
    #[error("training diverged at epoch {epoch}: error {error} exceeds 10x initial {initial}")]
    Diverged {
        epoch: usize,
        error: f64,
        initial: f64,
    },

    /// Text serialization could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(expected: usize, got: usize, context: &'static str) -> Self {
        Error::DimensionMismatch {
            expected,
            got,
            context,
        }
    }
}
