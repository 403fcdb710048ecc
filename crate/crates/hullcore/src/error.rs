//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the range an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structured input (a weight, partition, or block list) breaks an
    /// invariant the operation relies on.
    #[error("validation error: {0}")]
    Validation(String),

    /// A coefficient index falls beyond the last partition boundary.
    #[error("coefficient index {first_uncovered} lies beyond the last partition boundary")]
    Coverage { first_uncovered: u64 },

    /// A solver failed to bracket or converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A bounded search ran out of room.
    #[error("search failure: {0}")]
    Search(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn search(msg: impl Into<String>) -> Self {
        Error::Search(msg.into())
    }
}
