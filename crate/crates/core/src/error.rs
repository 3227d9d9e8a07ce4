use thiserror::Error;

/// Errors raised by the library.
///
/// A zero denominator mean is never an error; it is modelled by
/// [`Interval::Undefined`](crate::Interval::Undefined) and `None` estimates.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("numerator and denominator lengths differ ({xs} vs {ys})")]
    LengthMismatch { xs: usize, ys: usize },

    #[error("non-finite observation at index {index}")]
    NonFinite { index: usize },

    #[error("{name} must lie in (0, 1), got {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("method {method} requires {expected} bounds")]
    BoundsMismatch {
        method: &'static str,
        expected: &'static str,
    },

    #[error("construction invariant violated: {0}")]
    ConstructionInvariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Checks `0 < value < 1`.
pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
