//! Error type shared by the whole crate.
//!
//! Two failure classes are distinguished because callers map them to
//! different process exit codes:
//!   * `InvalidInput` — the caller handed us something malformed or out of
//!     contract (bad weights, zero coordinates, coincident points, ...).
//!   * `Invariant` — an internal consistency check failed.  This is never
//!     a user error; it means the computation cannot be trusted and the
//!     run must abort loudly.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or out-of-contract input.
    InvalidInput(String),
    /// A hard internal invariant was violated; results are not trustworthy.
    Invariant(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Invariant(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
