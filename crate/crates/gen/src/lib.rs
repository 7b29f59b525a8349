//! Paraphrase generation for readability control: prompt catalog, provider
//! backends, garbage detection, the run pipeline with its record store, and
//! scoring of finished runs.

pub mod config;
pub mod embed;
pub mod error;
pub mod garbage;
pub mod pipeline;
pub mod prompts;
pub mod provider;
pub mod rewrite;
pub mod scoring;
pub mod store;
pub mod synth;

pub use config::{ProviderConfig, ProviderKind};
pub use error::{ConfigError, EmbedError, GenerateError, PipelineError, PromptError, ScoreError, StoreError};
pub use garbage::{detect_garbage, garbage_reason, GarbageReason, GarbageThresholds};
pub use prompts::{build_prompt, PromptCatalog, PromptPayload, PromptSpec};
pub use provider::{HttpChatProvider, MockProvider, Provider, ProviderMeta, ProviderOutput};
pub use rewrite::{mock_rewrite, rewrite_toward, RewriteOptions, RewriteOutcome, SynonymLexicon};
pub use embed::{Embedder, EmbeddedText, HttpEmbedder, LexiconEmbedder};
pub use pipeline::{init_run, run, Mode, RunManifest, RunOptions, RunSummary};
pub use store::{GenerationRecord, RecordKey, RecordStore};
pub use scoring::{load_scores, report_run, score_run, ScoredRun};
