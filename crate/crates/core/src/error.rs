use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates the hypotheses of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input vectors are not in general position (rank-deficient selection,
    /// vanishing projection).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical routine failed to converge or hit an ill-conditioned
    /// system.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The sampler exhausted its retry budget for general-position draws.
    #[error("sampling failure: {0}")]
    Sampling(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
