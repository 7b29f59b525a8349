use std::path::PathBuf;

use thiserror::Error;

use readctl_core::Level;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("unknown readability level {0}; expected one of 5, 20, 40, 55, 65, 75, 85, 95")]
    UnknownLevel(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("provider kind chat-http requires `{0}`")]
    MissingField(&'static str),
    #[error("invalid provider setting `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

/// Failures of a single generation request. The variants are distinct so
/// the pipeline can choose between falling back and aborting.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("rate limited on every one of {attempts} attempt(s)")]
    RateLimitExhausted { attempts: u32 },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("server error {status} after {attempts} attempt(s)")]
    Server { status: u16, attempts: u32 },
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { message: String, attempts: u32 },
}

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedding request failed: {0}")]
    Transport(String),
    #[error("embedding service returned status {0}")]
    Status(u16),
    #[error("malformed embedding response: {0}")]
    MalformedResponse(String),
    #[error("embedding service not ready")]
    NotReady,
    #[error("cannot read embedding lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("embedding lexicon line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("record store {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("record store {path} line {line}: {reason}")]
    Corrupt { path: PathBuf, line: usize, reason: String },
    #[error("cannot encode record: {0}")]
    Encode(String),
    #[error("record {0} is already stored")]
    Duplicate(String),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("corpus content changed since the run started (recorded {recorded}, found {found})")]
    CorpusHashMismatch { recorded: String, found: String },
    #[error(transparent)]
    Storage(#[from] StoreError),
    #[error("run aborted: provider rejected credentials ({0})")]
    AbortedByAuthError(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dataset(#[from] readctl_core::DatasetError),
    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("run is incomplete; missing final records for {}", format_missing(.missing))]
    IncompleteRun { missing: Vec<(String, Level)> },
    #[error(transparent)]
    Storage(#[from] StoreError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("source {source_id}: {reason}")]
    Unscorable { source_id: String, reason: String },
    #[error(transparent)]
    Run(#[from] PipelineError),
    #[error(transparent)]
    Report(#[from] readctl_core::ReportError),
}

fn format_missing(missing: &[(String, Level)]) -> String {
    const SHOWN: usize = 10;
    let mut parts: Vec<String> = missing.iter().take(SHOWN).map(|(id, l)| format!("({id}, {l})")).collect();
    if missing.len() > SHOWN {
        parts.push(format!("and {} more", missing.len() - SHOWN));
    }
    parts.join(", ")
}
