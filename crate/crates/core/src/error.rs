use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
///
/// The variants line up with the command-line exit codes: usage and parse
/// problems are caller mistakes, capacity errors mean an exhaustive search
/// would exceed the configured bound, and invariant violations signal that
/// an input did not have the structure an operation relies on.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("capacity error: {what} is {got}, limit is {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
