use thiserror::Error;

/// Errors raised by the low-noise channel toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A numeric argument lies outside its admissible range (e.g. a negative noise parameter).
    #[error("domain error: {0}")]
    Domain(String),

    /// An input violated a documented precondition (non-Hermitian operator, non-normalized state, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// Malformed channel spec file; `path` names the offending field.
    #[error("invalid channel spec at `{path}`: {message}")]
    Spec { path: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
