use thiserror::Error;

/// Errors raised by state construction, channels, observables and sweeps.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must agree on their mode count do not.
    #[error("dimension mismatch: expected {expected} modes, found {found}")]
    Dimension { expected: usize, found: usize },

    /// A state violates the uncertainty principle.
    #[error("state is not physical: smallest symplectic eigenvalue {0:.3e} < 1/2")]
    Unphysical(f64),

    /// A numerical procedure produced a non-finite or inconsistent value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A sweep or CLI configuration is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
