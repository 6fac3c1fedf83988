//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state construction, searches, and verifiers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Operand dimensions are incompatible or outside an operation's domain.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An input value violates a construction invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A size cap was exceeded (operator dimension or branch count).
    #[error("size error: {0}")]
    Size(String),

    /// Lookup of a named state set failed.
    #[error("unknown named set `{0}`")]
    UnknownName(String),

    /// A basis offered as a distinguishability witness does not satisfy
    /// the required η-orthogonality conditions.
    #[error("invalid witness: {0}")]
    WitnessInvalid(String),

    /// A feasibility decision could not be resolved on either side of its
    /// tolerance band. Never silently classified; callers must surface it.
    #[error("numerically indeterminate: {0}")]
    NumericalIndeterminate(String),

    /// A state-set document failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
