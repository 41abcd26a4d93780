use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the pipeline.
///
/// Variants are split by whether the caller handed us bad input
/// ([`Error::is_validation`]) or something failed while running.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{path}:{line}: malformed row: {reason}")]
    MalformedRow {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("document `{0}` has no text after normalization")]
    EmptyDocument(String),

    #[error("invalid grade `{0}`: expected 1, 2 or 3")]
    InvalidGrade(String),

    #[error("invalid language code `{0}`: expected three lowercase ASCII letters")]
    InvalidLanguage(String),

    #[error("corpus mixes languages `{expected}` and `{found}`")]
    LanguageMismatch { expected: String, found: String },

    #[error("word `{0}` contains non-letter characters")]
    NonLetterWord(String),

    #[error("word `{0}` has no vowel and cannot be syllabified")]
    NoVowel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ranked list is empty")]
    EmptyList,

    #[error("ranked list contains duplicate item `{0}`")]
    DuplicateItem(String),

    #[error("no {n}-grams available: {context}")]
    NoNgrams { n: usize, context: String },

    #[error("n-gram profiles disagree: {0}")]
    ProfileMismatch(String),

    #[error("language `{0}` is not present")]
    MissingLanguage(String),

    #[error("embedding file: {0}")]
    Embedding(String),

    #[error("no embedding for document `{0}`")]
    MissingEmbedding(String),

    #[error("feature schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },

    #[error("class {label} has {count} members, fewer than k = {k}")]
    ClassTooSmall { label: u8, count: usize, k: usize },

    #[error("training data needs at least two classes")]
    SingleClass,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("degenerate test: {0}")]
    Degenerate(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("config: {0}")]
    Config(String),

    #[error("unsupported model format version {0}")]
    ModelVersion(u32),

    #[error("data leakage: document `{0}` is in both train and test sets")]
    Leakage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error stems from invalid user input rather than a
    /// failure while processing valid input.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io(_) | Error::Degenerate(_) | Error::Leakage(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
