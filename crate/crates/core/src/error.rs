use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Infeasible or out-of-range model parameters.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Exhaustive enumeration refused because the instance is too large.
    #[error("capacity error: n = {n} exceeds the enumeration cap of {cap} vertices")]
    Capacity { n: usize, cap: usize },

    /// A special function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must agree in size do not.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// A restriction selector was applied to a table of the wrong mode.
    #[error("selector {selector} is not compatible with a {mode} table")]
    IncompatibleSelector { selector: String, mode: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
