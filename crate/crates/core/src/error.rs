use thiserror::Error;

/// Failure modes shared across the pipeline. The variants line up with the
/// CLI exit codes (malformed 2, invalid 1, inconsistency 3, resource 4).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
