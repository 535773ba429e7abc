use std::path::PathBuf;

use crate::diff_codec::ViolationKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: &'static str },

    #[error("reserved token {token:?} not allowed here")]
    ReservedToken { token: String },

    #[error("malformed tagged sequence: {kind} at position {position}")]
    MalformedTags { position: usize, kind: ViolationKind },

    #[error("malformed character view at position {position}: {reason}")]
    MalformedCharView { position: usize, reason: &'static str },

    #[error("sequence already carries a domain token")]
    DuplicateDomain,

    #[error("invalid domain label {0:?}")]
    InvalidDomain(String),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("source mismatch at sentence {sentence}: hypothesis source does not match gold source")]
    SourceMismatch { sentence: usize },

    #[error("invalid edit set: {0}")]
    InvalidEdits(String),

    #[error("edit is not a replacement")]
    NotReplacement,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("model file: {0}")]
    Model(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl std::fmt::Display, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
