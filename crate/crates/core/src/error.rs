use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A frame, window, or individual index outside the data.
    #[error("out of range: {0}")]
    Range(String),

    /// Data that violates a type invariant (non-finite values, too few frames, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// Inconsistent configuration or scenario.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Request beyond what a routine supports, e.g. too many columns for the exhaustive solver.
    #[error("unsupported: {0}")]
    Capability(String),
}

impl Error {
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
