use thiserror::Error;

use crate::model::GroundTruth;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: unknown ground-truth token `{token}` (allowed: {allowed})")]
    UnknownTruth {
        line: u64,
        token: String,
        allowed: String,
    },

    #[error("statement `{0}` is not in the declared vocabulary")]
    UnknownStatement(String),

    #[error("duplicate statement category `{0}`")]
    DuplicateCategory(String),

    #[error("negative count for `{label}`: {value}")]
    NegativeCount { label: String, value: String },

    #[error("no observations under hypothesis {0}")]
    NoObservations(GroundTruth),

    #[error("likelihood ratio is undefined (0/0)")]
    UndefinedLr,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid verbal scale: {0}")]
    InvalidScale(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
