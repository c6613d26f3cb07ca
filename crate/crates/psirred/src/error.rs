//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by the decision procedures and the input layer.
///
/// Mathematical outcomes (including failed hypotheses) are never errors; they
/// are reported through [`crate::criteria::Verdict`]. Errors signal malformed
/// input, unsupported requests or resource limits.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Structurally or mathematically malformed input.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Two characters from different character groups were combined.
    #[error("characters belong to different character groups")]
    GroupMismatch,
    /// Weyl group enumeration would exceed the configured budget.
    #[error("Weyl group enumeration exceeds the budget of {budget} elements")]
    WeylBudget {
        /// The configured budget.
        budget: u64,
    },
    /// The request is outside what the library supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Input document failed schema validation.
    #[error("schema error at {path}: {message}")]
    Schema {
        /// JSON-pointer-like path of the offending field.
        path: String,
        /// Human-readable description.
        message: String,
    },
    /// File system failure.
    #[error("I/O error: {0}")]
    Io(String),
    /// An internal consistency check failed; this indicates a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
