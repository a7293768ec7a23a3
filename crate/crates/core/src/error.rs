use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },

    #[error("line {line}: duplicate lexicon entry `{surface}`")]
    DuplicateSurface { surface: String, line: usize },

    #[error("line {line}: invalid weight `{value}` (expected a nonnegative integer)")]
    InvalidWeight { value: String, line: usize },

    #[error("line {line}: malformed entry: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("duplicate document id `{0}`")]
    DuplicateDocumentId(String),

    #[error("document `{0}` has not been tokenized")]
    Untokenized(String),

    #[error("no word occurs {min_count} or more times; try a lower minimum count")]
    EmptyVocabulary { min_count: u64 },

    #[error("corpus contains no documents")]
    EmptyCorpus,

    #[error("word `{0}` never occurs in the corpus")]
    ZeroRow(String),

    #[error("cosine is undefined for an all-zero vector")]
    ZeroVector,

    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("threshold statistics need at least 2 words, got {0}")]
    TooFewWords(usize),

    #[error("words with zero variance across documents: {}", .0.join(", "))]
    ZeroVariance(Vec<String>),

    #[error("matrix contains non-finite values")]
    NonFinite,

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("cannot extract {k} factors from {n} variables")]
    FactorCount { k: usize, n: usize },

    #[error("eigenvalue {index} is {value}, cannot extract a factor with nonpositive variance")]
    NonPositiveEigenvalue { index: usize, value: f64 },

    #[error("word `{0}` has zero communality")]
    ZeroCommunality(String),

    #[error("inputs disagree on the vocabulary: {0}")]
    VocabularyMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Decodes UTF-8, stripping a leading byte order mark.
pub(crate) fn decode_utf8(bytes: &[u8]) -> Result<&str> {
    let (skip, body) = match bytes.strip_prefix(b"\xEF\xBB\xBF") {
        Some(rest) => (3, rest),
        None => (0, bytes),
    };
    std::str::from_utf8(body).map_err(|e| Error::InvalidUtf8 {
        offset: skip + e.valid_up_to(),
    })
}
