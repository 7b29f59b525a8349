//! The configuration file and its command-line overrides.
//!
//! Every key `section.name` in the TOML file has exactly one flag,
//! `--section-name`. Flags win over the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use readctl_core::dataset::LoadOptions;
use readctl_core::report::{LengthChangeMode, ReportOptions};
use readctl_core::Level;
use readctl_gen::{GarbageThresholds, Mode, PromptCatalog, ProviderConfig, ProviderKind};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub path: Option<PathBuf>,
    pub text_column: String,
    pub id_column: Option<String>,
    /// A single character, or `tab`.
    pub delimiter: String,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            path: None,
            text_column: "text".into(),
            id_column: None,
            delimiter: ",".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub mode: Mode,
    /// Level labels, strictly increasing.
    pub targets: Vec<u32>,
    /// Worker threads; 0 picks one per core, up to 8.
    pub workers: usize,
    /// Defaults to `<mode>-<first 12 hex digits of the settings digest>`.
    pub run_id: Option<String>,
}

impl Default for PipelineSection {
    fn default() -> Self {
        PipelineSection {
            mode: Mode::OneStep,
            targets: Level::ALL.iter().map(|l| u32::from(l.label())).collect(),
            workers: 0,
            run_id: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub min_count: usize,
    pub bin_width: f64,
    pub length_change: LengthChangeMode,
    pub svg: bool,
}

impl Default for MetricsSection {
    fn default() -> Self {
        let r = ReportOptions::default();
        MetricsSection {
            min_count: r.min_count,
            bin_width: r.bin_width,
            length_change: r.length_change,
            svg: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "runs".into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingKind {
    LexiconFile,
    HttpService,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSection {
    pub kind: EmbeddingKind,
    /// `word<TAB>v1 v2 ...`; without it every token is hashed.
    pub lexicon_path: Option<PathBuf>,
    pub hashed_dimension: usize,
    pub url: Option<String>,
    pub model: Option<String>,
    pub timeout_secs: f64,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        EmbeddingSection {
            kind: EmbeddingKind::None,
            lexicon_path: None,
            hashed_dimension: 64,
            url: None,
            model: None,
            timeout_secs: 60.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptsSection {
    /// Replacement instructions keyed by level label.
    pub overrides: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub corpus: CorpusSection,
    pub provider: ProviderConfig,
    pub pipeline: PipelineSection,
    pub garbage: GarbageThresholds,
    pub metrics: MetricsSection,
    pub output: OutputSection,
    pub embedding: EmbeddingSection,
    pub prompts: PromptsSection,
}

impl CliConfig {
    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn load_options(&self) -> Result<LoadOptions, Failure> {
        let delimiter = match self.corpus.delimiter.as_str() {
            "tab" | "\\t" | "\t" => b'\t',
            d if d.len() == 1 => d.as_bytes()[0],
            d => return Err(Failure::usage(format!("corpus.delimiter must be one character or \"tab\", got {d:?}"))),
        };
        Ok(LoadOptions {
            text_column: self.corpus.text_column.clone(),
            id_column: self.corpus.id_column.clone(),
            delimiter,
        })
    }

    pub fn targets(&self) -> Result<Vec<Level>, Failure> {
        let mut levels = Vec::new();
        for &label in &self.pipeline.targets {
            let level = Level::from_label(label)
                .ok_or_else(|| Failure::usage(format!("pipeline.targets: {label} is not a level label")))?;
            if levels.last().is_some_and(|&prev| prev >= level) {
                return Err(Failure::usage("pipeline.targets must be strictly increasing"));
            }
            levels.push(level);
        }
        if levels.is_empty() {
            return Err(Failure::usage("pipeline.targets is empty"));
        }
        Ok(levels)
    }

    pub fn prompt_catalog(&self) -> Result<PromptCatalog, Failure> {
        let mut overrides = Vec::new();
        for (label, text) in &self.prompts.overrides {
            let level = label
                .trim()
                .parse::<u32>()
                .ok()
                .and_then(Level::from_label)
                .ok_or_else(|| Failure::usage(format!("prompts.overrides: {label:?} is not a level label")))?;
            overrides.push((level, text.as_str()));
        }
        Ok(PromptCatalog::with_overrides(overrides))
    }

    pub fn report_options(&self) -> Result<ReportOptions, Failure> {
        if self.metrics.bin_width.is_nan() || self.metrics.bin_width <= 0.0 {
            return Err(Failure::usage("metrics.bin_width must be positive"));
        }
        Ok(ReportOptions {
            bin_width: self.metrics.bin_width,
            min_count: self.metrics.min_count,
            length_change: self.metrics.length_change,
        })
    }
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.to_string()))
        .ok_or_else(|| format!("expected LEVEL=TEXT, got {s:?}"))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<ProviderKind, String> {
    s.parse::<ProviderKind>().map_err(|e| e.to_string())
}

fn parse_length_change(s: &str) -> Result<LengthChangeMode, String> {
    match s {
        "percent" => Ok(LengthChangeMode::Percent),
        "words" => Ok(LengthChangeMode::Words),
        _ => Err(format!("expected percent or words, got {s:?}")),
    }
}

/// One flag per config key.
#[derive(Debug, Clone, Default, Args)]
#[command(next_help_heading = "Configuration (flags override the config file)")]
pub struct Overrides {
    /// Corpus file (delimited) or directory of .txt files
    #[arg(long, global = true, value_name = "PATH")]
    pub corpus_path: Option<PathBuf>,
    /// Column holding the passage text [default: text]
    #[arg(long, global = true, value_name = "NAME")]
    pub corpus_text_column: Option<String>,
    /// Column holding the source id [default: row index]
    #[arg(long, global = true, value_name = "NAME")]
    pub corpus_id_column: Option<String>,
    /// Field delimiter: one character or "tab" [default: ,]
    #[arg(long, global = true, value_name = "CHAR")]
    pub corpus_delimiter: Option<String>,

    /// Provider backend: mock or chat-http [default: mock]
    #[arg(long, global = true, visible_alias = "provider", value_name = "KIND", value_parser = parse_kind)]
    pub provider_kind: Option<ProviderKind>,
    /// Chat-completions URL (chat-http)
    #[arg(long, global = true, value_name = "URL")]
    pub provider_endpoint: Option<String>,
    /// Model name sent to the endpoint (chat-http)
    #[arg(long, global = true, value_name = "NAME")]
    pub provider_model_name: Option<String>,
    /// Environment variable holding the API key [default: READCTL_API_KEY]
    #[arg(long, global = true, value_name = "VAR")]
    pub provider_api_key_env: Option<String>,
    /// Sampling temperature [default: 1.0]
    #[arg(long, global = true, value_name = "T")]
    pub provider_temperature: Option<f64>,
    /// Retries after a failed request [default: 4]
    #[arg(long, global = true, value_name = "N")]
    pub provider_max_retries: Option<u32>,
    /// First backoff delay in milliseconds [default: 500]
    #[arg(long, global = true, value_name = "MS")]
    pub provider_retry_initial_ms: Option<u64>,
    /// Backoff growth factor per retry [default: 2.0]
    #[arg(long, global = true, value_name = "X")]
    pub provider_retry_multiplier: Option<f64>,
    /// Per-request timeout in seconds [default: 60]
    #[arg(long, global = true, value_name = "SECS")]
    pub provider_request_timeout_secs: Option<f64>,
    /// Most concurrent requests [default: 4]
    #[arg(long, global = true, value_name = "N")]
    pub provider_max_in_flight: Option<usize>,
    /// Request rate limit, 0 for none [default: 0]
    #[arg(long, global = true, value_name = "RPS")]
    pub provider_requests_per_second: Option<f64>,
    /// Seed for the mock rewriter [default: 0]
    #[arg(long, global = true, value_name = "N")]
    pub provider_seed: Option<u64>,
    /// Optional system message (chat-http)
    #[arg(long, global = true, value_name = "TEXT")]
    pub provider_system_prompt: Option<String>,

    /// one-step, two-step or copy [default: one-step]
    #[arg(long, global = true, visible_alias = "mode", value_name = "MODE", value_parser = parse_mode)]
    pub pipeline_mode: Option<Mode>,
    /// Comma-separated level labels [default: all eight]
    #[arg(long, global = true, value_name = "LABELS", value_delimiter = ',')]
    pub pipeline_targets: Option<Vec<u32>>,
    /// Worker threads, 0 for automatic [default: 0]
    #[arg(long, global = true, value_name = "N")]
    pub pipeline_workers: Option<usize>,
    /// Run identifier [default: derived from the settings]
    #[arg(long, global = true, value_name = "ID")]
    pub pipeline_run_id: Option<String>,

    /// Largest share of long vowel-less tokens [default: 0.2]
    #[arg(long, global = true, value_name = "F")]
    pub garbage_max_vowelless_fraction: Option<f64>,
    /// Token length from which vowel-less tokens count [default: 4]
    #[arg(long, global = true, value_name = "N")]
    pub garbage_min_vowelless_len: Option<usize>,
    /// Run of one repeated token that counts as garbage [default: 5]
    #[arg(long, global = true, value_name = "N")]
    pub garbage_max_repeat_run: Option<usize>,
    /// Largest share of non-alphabetic characters [default: 0.4]
    #[arg(long, global = true, value_name = "F")]
    pub garbage_max_non_alpha_fraction: Option<f64>,
    /// Fewest output words for a long source [default: 3]
    #[arg(long, global = true, value_name = "N")]
    pub garbage_min_output_words: Option<usize>,
    /// Source length from which the previous rule applies [default: 30]
    #[arg(long, global = true, value_name = "N")]
    pub garbage_long_source_words: Option<usize>,

    /// Fewest observations per scatter bin [default: 10]
    #[arg(long, global = true, value_name = "N")]
    pub metrics_min_count: Option<usize>,
    /// Scatter bin width in score points [default: 5]
    #[arg(long, global = true, value_name = "W")]
    pub metrics_bin_width: Option<f64>,
    /// Length-change heatmap unit: percent or words [default: percent]
    #[arg(long, global = true, value_name = "UNIT", value_parser = parse_length_change)]
    pub metrics_length_change: Option<LengthChangeMode>,
    /// Also write SVG charts [default: true]
    #[arg(long, global = true, value_name = "BOOL")]
    pub metrics_svg: Option<bool>,

    /// Directory holding run directories [default: runs]
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    /// Token embeddings for the semantic score [default: none]
    #[arg(long, global = true, value_name = "KIND", value_enum)]
    pub embedding_kind: Option<EmbeddingKind>,
    /// Vector file for lexicon-file embeddings
    #[arg(long, global = true, value_name = "PATH")]
    pub embedding_lexicon_path: Option<PathBuf>,
    /// Dimension of hashed vectors when no lexicon file is given [default: 64]
    #[arg(long, global = true, value_name = "N")]
    pub embedding_hashed_dimension: Option<usize>,
    /// Base URL of the embedding service
    #[arg(long, global = true, value_name = "URL")]
    pub embedding_url: Option<String>,
    /// Model requested from the embedding service
    #[arg(long, global = true, value_name = "NAME")]
    pub embedding_model: Option<String>,
    /// Embedding request timeout in seconds [default: 60]
    #[arg(long, global = true, value_name = "SECS")]
    pub embedding_timeout_secs: Option<f64>,

    /// Replace the instruction for a level; repeatable
    #[arg(long, global = true, value_name = "LEVEL=TEXT", value_parser = parse_override)]
    pub prompts_overrides: Vec<(String, String)>,
}

macro_rules! set {
    ($flag:expr => $slot:expr) => {
        if let Some(v) = $flag.clone() {
            $slot = v;
        }
    };
    ($flag:expr => some $slot:expr) => {
        if let Some(v) = $flag.clone() {
            $slot = Some(v);
        }
    };
}

impl Overrides {
    pub fn apply(&self, c: &mut CliConfig) {
        set!(self.corpus_path => some c.corpus.path);
        set!(self.corpus_text_column => c.corpus.text_column);
        set!(self.corpus_id_column => some c.corpus.id_column);
        set!(self.corpus_delimiter => c.corpus.delimiter);

        set!(self.provider_kind => c.provider.kind);
        set!(self.provider_endpoint => some c.provider.endpoint);
        set!(self.provider_model_name => some c.provider.model_name);
        set!(self.provider_api_key_env => c.provider.api_key_env);
        set!(self.provider_temperature => c.provider.temperature);
        set!(self.provider_max_retries => c.provider.max_retries);
        set!(self.provider_retry_initial_ms => c.provider.retry_initial_ms);
        set!(self.provider_retry_multiplier => c.provider.retry_multiplier);
        set!(self.provider_request_timeout_secs => c.provider.request_timeout_secs);
        set!(self.provider_max_in_flight => c.provider.max_in_flight);
        set!(self.provider_requests_per_second => c.provider.requests_per_second);
        set!(self.provider_seed => c.provider.seed);
        set!(self.provider_system_prompt => some c.provider.system_prompt);

        set!(self.pipeline_mode => c.pipeline.mode);
        set!(self.pipeline_targets => c.pipeline.targets);
        set!(self.pipeline_workers => c.pipeline.workers);
        set!(self.pipeline_run_id => some c.pipeline.run_id);

        set!(self.garbage_max_vowelless_fraction => c.garbage.max_vowelless_fraction);
        set!(self.garbage_min_vowelless_len => c.garbage.min_vowelless_len);
        set!(self.garbage_max_repeat_run => c.garbage.max_repeat_run);
        set!(self.garbage_max_non_alpha_fraction => c.garbage.max_non_alpha_fraction);
        set!(self.garbage_min_output_words => c.garbage.min_output_words);
        set!(self.garbage_long_source_words => c.garbage.long_source_words);

        set!(self.metrics_min_count => c.metrics.min_count);
        set!(self.metrics_bin_width => c.metrics.bin_width);
        set!(self.metrics_length_change => c.metrics.length_change);
        set!(self.metrics_svg => c.metrics.svg);

        set!(self.output_dir => c.output.dir);

        set!(self.embedding_kind => c.embedding.kind);
        set!(self.embedding_lexicon_path => some c.embedding.lexicon_path);
        set!(self.embedding_hashed_dimension => c.embedding.hashed_dimension);
        set!(self.embedding_url => some c.embedding.url);
        set!(self.embedding_model => some c.embedding.model);
        set!(self.embedding_timeout_secs => c.embedding.timeout_secs);

        for (level, text) in &self.prompts_overrides {
            c.prompts.overrides.insert(level.clone(), text.clone());
        }
    }
}
