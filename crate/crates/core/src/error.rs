use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("text contains no word tokens")]
    EmptyText,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    /// A constant side or fewer than two points; the statistic is undefined.
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("reference has no tokens")]
    EmptyReference,
    #[error("embedding dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("embedding list for the {0} side is empty")]
    EmptySide(&'static str),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("column {name:?} not found; available columns: {}", available.join(", "))]
    MissingColumn { name: String, available: Vec<String> },
    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("duplicate source id {0:?}")]
    DuplicateId(String),
    #[error("failed to write corpus: {0}")]
    Write(String),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown heatmap variable {0:?}; expected one of generated-fres, wer, semantic-f1, length-change")]
    UnknownVariable(String),
    #[error("storage error at {path}: {source}")]
    Storage {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization error: {0}")]
    Serialize(String),
}
