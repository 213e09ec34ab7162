use thiserror::Error;

/// Errors produced by the channel and measure computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("domain error in {function}: {reason}")]
    Domain {
        function: &'static str,
        reason: String,
    },

    /// Result not representable as a finite `f64`.
    #[error("overflow in {function} at argument {argument}")]
    Overflow {
        function: &'static str,
        argument: f64,
    },

    /// Invalid or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Requested time outside the tabulated range.
    #[error("time {tau} outside the table range [0, {tau_max}]")]
    Range { tau: f64, tau_max: f64 },

    /// Quadrature or other numerical procedure failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Input rejected by a structural check (physicality, Hermiticity, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The operation is defined only for a narrower configuration.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
