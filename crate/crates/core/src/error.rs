use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure could not produce a trustworthy value.
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
