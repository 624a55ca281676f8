use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text, with the 1-based line number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Well-formed input that violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Gold and predicted corpora do not line up.
    #[error("alignment error at sentence {sentence}: {message}")]
    Alignment { sentence: usize, message: String },

    /// Bad model or report file contents.
    #[error("format error: {0}")]
    Format(String),

    /// A caller supplied an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An energy counter could not be read.
    #[error("energy counter: {0}")]
    Counter(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
