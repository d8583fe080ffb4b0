use thiserror::Error;

/// Errors raised by the library.
///
/// `TheoremViolation` is kept separate from input errors: it means a
/// construction produced something a proven result forbids, which is either
/// a bug here or a counterexample worth reporting.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operation `{op}` expects {expected} arguments, got {got}")]
    ArityMismatch { op: String, expected: usize, got: usize },

    #[error("element {value} out of range for universe of size {size}")]
    OutOfRange { value: usize, size: usize },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("not a congruence: {0}")]
    NotCongruence(String),

    #[error("set is not closed under the operations: {0}")]
    NotClosed(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource cap exceeded: {what} (cap {cap})")]
    ResourceCap { what: String, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("theorem violation in `{check}`: {witness}")]
    TheoremViolation { check: String, witness: String },

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn violation(check: &str, witness: impl Into<String>) -> Self {
        Error::TheoremViolation { check: check.to_string(), witness: witness.into() }
    }

    /// True for errors that signal a broken mathematical guarantee rather
    /// than bad input.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(self, Error::TheoremViolation { .. } | Error::Internal(_))
    }
}
