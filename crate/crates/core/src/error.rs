//! Crate-wide error type.

use std::fmt;
use std::io;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the library.
#[derive(Debug)]
pub enum Error {
    /// An argument violated an operation's preconditions.
    InvalidInput(String),
    /// A configuration file or experiment setup is unusable.
    Config(String),
    /// A dataset file could not be parsed. Line numbers are 1-based.
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    /// A binary file does not match its expected format.
    Format { offset: u64, message: String },
    /// A requested item (e.g. a query word) does not exist.
    NotFound(String),
    /// A computation produced non-finite values.
    NumericFault(String),
    /// A test oracle could not be evaluated.
    OracleFailure(String),
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Parse {
                path,
                line,
                message,
            } => write!(f, "parse error in {path} at line {line}: {message}"),
            Error::Format { offset, message } => {
                write!(f, "format error at byte {offset}: {message}")
            }
            Error::NotFound(what) => write!(f, "not found: {what}"),
            Error::NumericFault(msg) => write!(f, "numeric fault: {msg}"),
            Error::OracleFailure(msg) => write!(f, "oracle failure: {msg}"),
            Error::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Self {
        Error::Io(err)
    }
}
