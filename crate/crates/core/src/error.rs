use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The operation is not implemented for the given manifold or ambient space.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A closed-form quantity was requested outside the range where it holds.
    #[error("outside closed-form domain: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {what} (budget {budget})")]
    ResourceLimit { what: String, budget: usize },

    #[error("precision limit: {0}")]
    Precision(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
