use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("point {point} out of range for a structure with {size} points")]
    PointOutOfRange { point: usize, size: usize },

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("invalid tuple for relation {relation}: {message}")]
    Tuple { relation: String, message: String },

    #[error("signatures differ")]
    SignatureMismatch,

    #[error("not an embedding: {0}")]
    NotAnEmbedding(String),

    #[error("{what} exceeds budget: need {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("structure leaves the class: subset {witness:?} violates the bound")]
    NotInClass { witness: Vec<usize> },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
