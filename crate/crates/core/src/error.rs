use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Too many Poisson atoms (or kernel evaluations) would be generated.
    #[error("resource cap exceeded: {what} = {requested:.6e} > cap {cap:.6e}; {hint}")]
    ResourceCap {
        what: &'static str,
        requested: f64,
        cap: f64,
        hint: String,
    },

    /// Quadrature did not reach the requested tolerance.
    #[error("numerical failure: achieved relative error {achieved:.3e}, requested {requested:.3e}")]
    Numerical { achieved: f64, requested: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
