use alloc::string::String;
use core::fmt;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of an operation.
    Domain(String),
    /// An iterative method failed to converge or produced a non-finite value.
    Numerical(String),
    /// A computation would exceed its memory budget.
    Resource { what: String, simplices: u64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
            Error::Resource { what, simplices } => {
                write!(f, "resource error: {what} (attempted {simplices} simplices)")
            }
        }
    }
}

impl core::error::Error for Error {}
