//! Runs generation over a corpus: every source is rewritten for every
//! target level, in one or two steps, or copied unchanged as a baseline.
//!
//! A run lives in its own directory holding `manifest.json` and the
//! append-only `records.jsonl`. Re-running the same directory resumes it.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use chrono::{DateTime, SubsecRound, Utc};
use log::{info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use readctl_core::dataset::{content_hash, load_corpus, CorpusEntry, LoadOptions};
use readctl_core::Level;

use crate::config::ProviderConfig;
use crate::error::{GenerateError, PipelineError, StoreError};
use crate::garbage::{garbage_reason, GarbageThresholds};
use crate::prompts::PromptCatalog;
use crate::provider::{Provider, ProviderMeta};
use crate::store::{GenerationRecord, RecordKey, RecordStore};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORDS_FILE: &str = "records.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    OneStep,
    TwoStep,
    Copy,
}

impl Mode {
    pub fn final_step(self) -> u8 {
        match self {
            Mode::TwoStep => 2,
            Mode::OneStep | Mode::Copy => 1,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one-step" => Ok(Mode::OneStep),
            "two-step" => Ok(Mode::TwoStep),
            "copy" => Ok(Mode::Copy),
            other => Err(format!("unknown mode {other:?} (expected one-step, two-step or copy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRef {
    pub path: PathBuf,
    /// SHA-256 of the corpus content when the run was created.
    pub hash: String,
    pub load: LoadOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub corpus: CorpusRef,
    pub provider: ProviderConfig,
    pub mode: Mode,
    pub targets: Vec<Level>,
    pub garbage: GarbageThresholds,
    pub prompts: PromptCatalog,
    pub created_at: DateTime<Utc>,
}

impl RunManifest {
    /// A manifest for a new run, hashing the corpus now.
    pub fn new(
        run_id: impl Into<String>,
        corpus_path: &Path,
        load: LoadOptions,
        provider: ProviderConfig,
        mode: Mode,
    ) -> Result<Self, PipelineError> {
        provider.validate()?;
        Ok(RunManifest {
            run_id: run_id.into(),
            corpus: CorpusRef {
                path: corpus_path.to_path_buf(),
                hash: content_hash(corpus_path)?,
                load,
            },
            provider,
            mode,
            targets: Level::ALL.to_vec(),
            garbage: GarbageThresholds::default(),
            prompts: PromptCatalog::default(),
            created_at: Utc::now().trunc_subsecs(0),
        })
    }

    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|source| StoreError::Io { path: path.clone(), source })?;
        serde_json::from_str(&text).map_err(|e| {
            StoreError::Corrupt {
                path,
                line: e.line(),
                reason: e.to_string(),
            }
            .into()
        })
    }

    fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(self).map_err(|e| StoreError::Encode(e.to_string()))?;
        std::fs::write(&path, json + "\n").map_err(|source| StoreError::Io { path, source }.into())
    }

    /// Hex SHA-256 over every setting except the run id and creation time.
    /// Runs with equal digests produce equal records.
    pub fn settings_digest(&self) -> String {
        let settings = serde_json::json!({
            "corpus": self.corpus,
            "provider": self.provider,
            "mode": self.mode,
            "targets": self.targets,
            "garbage": self.garbage,
            "prompts": self.prompts,
        });
        Sha256::digest(settings.to_string().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn same_run(&self, other: &RunManifest) -> bool {
        RunManifest {
            created_at: other.created_at,
            ..self.clone()
        } == *other
    }
}

/// Creates the run directory and its manifest. If the directory already
/// holds a manifest for the same run settings, that manifest is kept and
/// returned so the run can be resumed; different settings are an error.
pub fn init_run(dir: &Path, manifest: &RunManifest) -> Result<RunManifest, PipelineError> {
    std::fs::create_dir_all(dir).map_err(|source| StoreError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    if dir.join(MANIFEST_FILE).exists() {
        let existing = RunManifest::load(dir)?;
        if existing.corpus.hash != manifest.corpus.hash {
            return Err(PipelineError::CorpusHashMismatch {
                recorded: existing.corpus.hash,
                found: manifest.corpus.hash.clone(),
            });
        }
        if !existing.same_run(manifest) {
            return Err(PipelineError::ManifestMismatch(format!(
                "{} already holds run {} with different settings",
                dir.display(),
                existing.run_id
            )));
        }
        return Ok(existing);
    }
    manifest.save(dir)?;
    Ok(manifest.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    /// Stop after writing this many new records, as if interrupted.
    pub stop_after: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: std::thread::available_parallelism().map_or(4, |n| n.get()).min(8),
            stop_after: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub sources: usize,
    pub written: usize,
    pub already_present: usize,
    /// Newly written records whose provider output was replaced by the input.
    pub fallbacks: usize,
    pub interrupted: bool,
}

struct SourceOutcome {
    records: Vec<GenerationRecord>,
    abort: Option<String>,
}

struct Worker<'a> {
    manifest: &'a RunManifest,
    provider: &'a dyn Provider,
    existing: &'a HashMap<RecordKey, GenerationRecord>,
}

impl Worker<'_> {
    fn key(&self, entry: &CorpusEntry, target: Level, step: u8) -> RecordKey {
        RecordKey {
            run_id: self.manifest.run_id.clone(),
            source_id: entry.source_id.clone(),
            target,
            step,
        }
    }

    fn step(
        &self,
        entry: &CorpusEntry,
        target: Level,
        step: u8,
        input: &str,
        parent: Option<RecordKey>,
    ) -> Result<GenerationRecord, String> {
        let mode = self.manifest.mode;
        let mut record = GenerationRecord {
            run_id: self.manifest.run_id.clone(),
            source_id: entry.source_id.clone(),
            target,
            step,
            is_final: step == mode.final_step(),
            input_text: input.to_string(),
            output_text: input.to_string(),
            fallback: false,
            fallback_reason: None,
            rejected_output: None,
            parent,
            provider_meta: ProviderMeta {
                model: self.provider.model().to_string(),
                ..ProviderMeta::default()
            },
        };
        if mode == Mode::Copy {
            record.provider_meta.model = "copy".into();
            return Ok(record);
        }
        let payload = self.manifest.prompts.payload(target, input);
        match self.provider.generate(&payload) {
            Ok(out) => {
                record.provider_meta = out.meta;
                match garbage_reason(&out.text, &entry.text, &self.manifest.garbage) {
                    None => record.output_text = out.text,
                    Some(reason) => {
                        warn!("{}/{target} step {step}: rejected output: {reason}", entry.source_id);
                        record.fallback = true;
                        record.fallback_reason = Some(format!("garbage: {reason}"));
                        record.rejected_output = Some(out.text);
                    }
                }
            }
            Err(GenerateError::Auth(msg)) => return Err(msg),
            Err(e) => {
                warn!("{}/{target} step {step}: {e}; keeping input", entry.source_id);
                record.fallback = true;
                record.fallback_reason = Some(format!("provider: {e}"));
            }
        }
        Ok(record)
    }

    fn process(&self, entry: &CorpusEntry, stop: &AtomicBool) -> SourceOutcome {
        let mut records = Vec::new();
        for &target in &self.manifest.targets {
            if stop.load(Ordering::Relaxed) {
                break;
            }
            let key1 = self.key(entry, target, 1);
            let first = match self.existing.get(&key1) {
                Some(r) => r.clone(),
                None => match self.step(entry, target, 1, &entry.text, None) {
                    Ok(r) => {
                        records.push(r.clone());
                        r
                    }
                    Err(msg) => return SourceOutcome { records, abort: Some(msg) },
                },
            };
            if self.manifest.mode == Mode::TwoStep && !self.existing.contains_key(&self.key(entry, target, 2)) {
                match self.step(entry, target, 2, &first.output_text, Some(key1)) {
                    Ok(r) => records.push(r),
                    Err(msg) => return SourceOutcome { records, abort: Some(msg) },
                }
            }
        }
        SourceOutcome { records, abort: None }
    }
}

/// Generates every missing record of the run in `dir`.
///
/// Sources are processed in parallel; each source's targets run in
/// ascending order and its records are appended by a single writer.
pub fn run(dir: &Path, provider: &dyn Provider, opts: &RunOptions) -> Result<RunSummary, PipelineError> {
    let manifest = RunManifest::load(dir)?;
    let found = content_hash(&manifest.corpus.path)?;
    if found != manifest.corpus.hash {
        return Err(PipelineError::CorpusHashMismatch {
            recorded: manifest.corpus.hash.clone(),
            found,
        });
    }
    let corpus = load_corpus(&manifest.corpus.path, &manifest.corpus.load)?;
    if manifest.mode != Mode::Copy {
        if let Err(e) = provider.preflight() {
            return Err(PipelineError::AbortedByAuthError(e.to_string()));
        }
    }
    let (mut store, existing) = RecordStore::open(&dir.join(RECORDS_FILE))?;
    let existing: HashMap<RecordKey, GenerationRecord> = existing.into_iter().map(|r| (r.key(), r)).collect();
    let mut summary = RunSummary {
        sources: corpus.entries.len(),
        already_present: existing.len(),
        ..RunSummary::default()
    };

    let worker = Worker {
        manifest: &manifest,
        provider,
        existing: &existing,
    };
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let mut abort = None;
    let mut failure = None;
    std::thread::scope(|scope| {
        let workers = opts.workers.max(1);
        let (tx, rx) = mpsc::sync_channel::<SourceOutcome>(workers * 2);
        for _ in 0..workers {
            let tx = tx.clone();
            let (worker, next, stop, entries) = (&worker, &next, &stop, &corpus.entries);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(entry) = entries.get(i) else { break };
                if tx.send(worker.process(entry, stop)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut done = 0usize;
        'outcomes: for outcome in rx.iter() {
            for record in &outcome.records {
                if opts.stop_after.is_some_and(|n| summary.written >= n) {
                    summary.interrupted = true;
                    break 'outcomes;
                }
                if let Err(e) = store.append(record) {
                    failure = Some(e);
                    break 'outcomes;
                }
                summary.written += 1;
                summary.fallbacks += usize::from(record.fallback);
            }
            if let Err(e) = store.sync() {
                failure = Some(e);
                break;
            }
            if let Some(msg) = outcome.abort {
                abort = Some(msg);
                break;
            }
            done += 1;
            if done.is_multiple_of(50) {
                info!("{done}/{} sources done", corpus.entries.len());
            }
        }
        stop.store(true, Ordering::Relaxed);
        // Dropping the receiver unblocks workers waiting to send.
        drop(rx);
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    if let Some(msg) = abort {
        return Err(PipelineError::AbortedByAuthError(msg));
    }
    Ok(summary)
}

/// The final record of every (source, target) pair.
pub fn final_records(records: &[GenerationRecord]) -> BTreeMap<(String, Level), &GenerationRecord> {
    records
        .iter()
        .filter(|r| r.is_final)
        .map(|r| ((r.source_id.clone(), r.target), r))
        .collect()
}
