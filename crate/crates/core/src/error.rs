use std::fmt;

/// Errors produced by evaluation, parsing, and resource accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input text (numerals, CLI arguments).
    Parse(String),
    /// The requested value is outside the function's certified domain,
    /// e.g. s not separable from 1, or s inside the guard region of an
    /// exceptional point.
    Domain(String),
    /// A configured cap (working bits, term count, exponent range) was
    /// exceeded.
    Resource(String),
    /// A caller-supplied magnitude hint was contradicted by a runtime
    /// check; indicates a bug in the calling code, not bad user input.
    Contract(String),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Resource(m) => write!(f, "resource error: {m}"),
            Error::Contract(m) => write!(f, "contract violation: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
