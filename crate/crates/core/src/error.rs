//! Error type shared by all fallible operations in this crate.

use std::fmt;

/// Errors reported by model evaluation, optimization and integration.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input that must be finite was NaN or infinite.
    NonFinite { what: &'static str },
    /// A parameter violated its documented range.
    InvalidParameter { what: &'static str, value: f64 },
    /// The operation is not defined for the supplied input.
    Domain { what: &'static str },
    /// A numerical procedure failed to produce a usable result.
    Numerical { what: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonFinite { what } => write!(f, "{what} must be finite"),
            Self::InvalidParameter { what, value } => {
                write!(f, "invalid value {value} for {what}")
            }
            Self::Domain { what } => write!(f, "operation undefined: {what}"),
            Self::Numerical { what } => write!(f, "numerical failure: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
