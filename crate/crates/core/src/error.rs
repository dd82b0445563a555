//! Error type shared by every module of the laboratory.

use std::fmt;

/// Errors raised by the measurement operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the inputs was violated (bad subdivision factor,
    /// non-positive content order, mismatched lattices, ...).
    InvalidParameter(String),
    /// A supremum fell below the zero floor, so a ratio of suprema would be
    /// meaningless (the sample is indistinguishable from the zero function).
    DegenerateField(String),
    /// A coefficient sample failed the symmetry or positivity checks.
    BadCoefficient(String),
    /// A file did not parse as the documented mask/grid format.
    Format(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DegenerateField(msg) => write!(f, "degenerate field: {msg}"),
            Error::BadCoefficient(msg) => write!(f, "bad coefficient matrix: {msg}"),
            Error::Format(msg) => write!(f, "format: {msg}"),
            Error::Io(msg) => write!(f, "io: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Suprema below this floor are treated as identically zero rather than fed
/// into logarithms.
pub const ZERO_FLOOR: f64 = 1e-300;
