//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Tensor or parameter dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A value or argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input is degenerate for the requested operation (e.g. a zero-norm
    /// vector fed to cosine similarity).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A training routine exhausted its budget without reaching its
    /// contracted quality bar.
    #[error("training failed: {0}")]
    TrainingFailure(String),

    /// A serialized artifact could not be decoded.
    #[error("malformed file: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
