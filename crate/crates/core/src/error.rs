use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// Where in the input a parse error was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    Row(usize),
    Byte(u64),
    Trace(usize),
    Unknown,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Row(n) => write!(f, "row {n}"),
            Location::Byte(n) => write!(f, "byte {n}"),
            Location::Trace(n) => write!(f, "trace {n}"),
            Location::Unknown => f.write_str("unknown position"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{format} parse error at {location}: {message}")]
pub struct ParseError {
    pub format: &'static str,
    pub location: Location,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(format: &'static str, location: Location, message: impl Into<String>) -> Self {
        ParseError {
            format,
            location,
            message: message.into(),
        }
    }
}
