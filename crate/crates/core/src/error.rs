use std::fmt;

use thiserror::Error;

/// Location of a token inside a statement, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("ingestion error at line {line}: {message}")]
    Ingest { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unknown attribute \"{0}\"")]
    UnknownAttribute(String),

    #[error("unknown object \"{0}\"")]
    UnknownObject(String),

    #[error("type error: {0}")]
    Type(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("malformed fdset record at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            message: message.into(),
        }
    }

    /// Contract violations signal a caller bug rather than bad user input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Contract(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
