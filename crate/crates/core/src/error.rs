use std::fmt;

/// Error type shared by every module of the crate.
///
/// The variants map onto the CLI exit-code classes: `Usage` -> 1,
/// `Data`/`Validation`/`Domain`/`Corrupt` -> 2, `Network` -> 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller passed an argument outside the documented domain.
    #[error("invalid input: {0}")]
    Usage(String),

    /// Not enough coefficient data to answer the request.
    #[error("insufficient data: {0}")]
    Data(String),

    /// A table or file failed a hard validation check.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A coefficient file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A remote fetch failed after the retry.
    #[error("network error: {0}")]
    Network(String),

    /// A cached file does not match its recorded checksum.
    #[error("cache corruption: {0}")]
    Corrupt(String),

    /// Internal consistency violation (e.g. a nonzero remainder in an
    /// exact division that must be exact).
    #[error("internal corruption: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Error::Usage(msg.to_string())
    }
    pub fn data(msg: impl fmt::Display) -> Self {
        Error::Data(msg.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
