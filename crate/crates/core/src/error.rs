use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::lexicon::OovReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("vector for word {0:?} has (near) zero norm")]
    ZeroNorm(String),

    #[error("embedding space is empty")]
    EmptySpace,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("duplicate romanization key {0:?}")]
    DuplicateKey(String),

    #[error("invalid romanization entry {key:?} -> {replacement:?}: {reason}")]
    InvalidTableEntry {
        key: String,
        replacement: String,
        reason: &'static str,
    },

    #[error("similarity is undefined for an empty string")]
    EmptyString,

    #[error("delete indexes were built with different k ({0} vs {1})")]
    MismatchedK(usize, usize),

    #[error("empty candidate list")]
    EmptyCandidates,

    #[error("language mismatch: {0}")]
    LanguageMismatch(String),

    #[error("requested {requested} pairs but the lexicon has only {available} usable pairs")]
    NotEnoughPairs { requested: usize, available: usize },

    #[error("dictionary is empty")]
    EmptyDictionary,

    #[error("dictionary id {id} out of range for a vocabulary of {len} words")]
    IdOutOfRange { id: usize, len: usize },

    #[error("seed lexicon has no usable pairs ({0})")]
    NoUsableSeed(OovReport),

    #[error("test lexicon is empty")]
    EmptyTestLexicon,

    #[error("no evaluable queries ({skipped} skipped as out of vocabulary)")]
    NoEvaluableQueries { skipped: usize },

    #[error("matrix is singular or rank deficient: {0}")]
    Singular(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(source_name: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Whether this error stems from bad user input rather than a failure
    /// while running. The CLI maps the former to exit code 1.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Config(_) => true,
            Error::Stage { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
