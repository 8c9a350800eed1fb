use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),

    #[error("map has no lanes")]
    EmptyMap,

    #[error("no path from node {start} to node {goal}")]
    NoPath { start: usize, goal: usize },

    #[error("covariance is not symmetric positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("timestamps not strictly increasing in stream `{source_id}`: {previous} then {current}")]
    NonMonotoneTimestamp {
        source_id: String,
        previous: f64,
        current: f64,
    },

    #[error("timestamp mismatch: {left} vs {right} exceeds {tolerance}")]
    TimestampMismatch {
        left: f64,
        right: f64,
        tolerance: f64,
    },

    #[error("logs diverge at frame {index}: ground truth t={gt:?}, detections t={det:?}")]
    LogDivergence {
        index: usize,
        gt: Option<f64>,
        det: Option<f64>,
    },

    #[error("object without track id in frame at t={0}")]
    MissingTrackId(f64),

    #[error("track id collision after prefixing: `{0}`")]
    IdCollision(String),

    #[error("asset catalog has no entry for class `{0}`")]
    NoAssetForClass(String),

    #[error("{0}")]
    Serialization(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
