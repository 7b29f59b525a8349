//! Scores a finished run and renders its report.
//!
//! Scoring reads the run's final records, computes the per-source scores,
//! the per-pair observations and the population fits, and writes them next
//! to the records.
//! Reporting reads those files back and exports the tables and charts.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use readctl_core::dataset::{content_hash, load_corpus, CorpusEntry};
use readctl_core::metrics::{length_change_pct, score_example_with, self_wer, semantic_score, PairMetrics};
use readctl_core::report::{
    build_report, export_bundle, population_summary, ExportOptions, PairObservation, ReportOptions,
};
use readctl_core::text::{analyze_with, normalized_tokens, Syllabifier};
use readctl_core::{ExampleScoreF64, LevelMap, PairObservationF64};

use crate::embed::Embedder;
use crate::error::{PipelineError, ScoreError, StoreError};
use crate::pipeline::{final_records, RunManifest, RECORDS_FILE};
use crate::store::read_records;

pub const SCORES_FILE: &str = "example_scores.jsonl";
pub const OBSERVATIONS_FILE: &str = "observations.jsonl";
pub const POPULATION_FILE: &str = "population.json";
pub const REPORT_DIR: &str = "report";

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRun {
    pub scores: Vec<ExampleScoreF64>,
    pub observations: Vec<PairObservationF64>,
}

fn score_source(
    entry: &CorpusEntry,
    outputs: &LevelMap<&str>,
    embedder: Option<&dyn Embedder>,
    syllabifier: &Syllabifier,
) -> Result<(ExampleScoreF64, Vec<PairObservationF64>), ScoreError> {
    let unscorable = |reason: String| ScoreError::Unscorable {
        source_id: entry.source_id.clone(),
        reason,
    };
    let source = analyze_with::<f64>(&entry.text, syllabifier).map_err(|e| unscorable(e.to_string()))?;
    let score = score_example_with(&entry.source_id, &source, outputs, syllabifier);
    let source_tokens = normalized_tokens(&entry.text);

    let embedded = match embedder {
        Some(e) => {
            let mut texts = vec![entry.text.as_str()];
            texts.extend(outputs.values().iter().copied());
            Some(e.embed(&texts)?)
        }
        None => None,
    };

    let mut observations = Vec::with_capacity(8);
    for (level, &text) in outputs.iter() {
        let generated_words = analyze_with::<f64>(text, syllabifier).map_or(0, |a| a.n_words);
        let wer = self_wer::<f64, _>(&source_tokens, &normalized_tokens(text)).map_err(|e| unscorable(e.to_string()))?;
        let semantic = embedded
            .as_ref()
            .and_then(|all| semantic_score::<f64, _>(&all[0].vectors, &all[level.index() + 1].vectors).ok());
        observations.push(PairObservation {
            source_id: entry.source_id.clone(),
            target: level,
            source_fres: source.fres,
            generated_fres: score.generated_fres[level],
            source_words: source.n_words,
            generated_words,
            metrics: PairMetrics {
                self_wer: wer,
                sem_precision: semantic.map(|s| s.precision),
                sem_recall: semantic.map(|s| s.recall),
                sem_f1: semantic.map(|s| s.f1),
                length_change_pct: length_change_pct(source.n_words, generated_words),
            },
        });
    }
    Ok((score, observations))
}

/// Scores every source of the run in `dir` and writes the score files.
/// Fails with [`ScoreError::IncompleteRun`] if any pair lacks a final record.
pub fn score_run(dir: &Path, embedder: Option<&dyn Embedder>) -> Result<ScoredRun, ScoreError> {
    let manifest = RunManifest::load(dir)?;
    let found = content_hash(&manifest.corpus.path).map_err(PipelineError::from)?;
    if found != manifest.corpus.hash {
        return Err(PipelineError::CorpusHashMismatch {
            recorded: manifest.corpus.hash,
            found,
        }
        .into());
    }
    let corpus = load_corpus(&manifest.corpus.path, &manifest.corpus.load).map_err(PipelineError::from)?;
    let records = read_records(&dir.join(RECORDS_FILE))?;
    let finals = final_records(&records);

    let mut missing = Vec::new();
    let mut jobs = Vec::with_capacity(corpus.entries.len());
    for entry in &corpus.entries {
        let outputs = LevelMap::from_fn(|level| {
            let found = finals.get(&(entry.source_id.clone(), level));
            if found.is_none() {
                missing.push((entry.source_id.clone(), level));
            }
            found.map(|r| r.output_text.as_str())
        });
        jobs.push((entry, outputs));
    }
    if !missing.is_empty() {
        return Err(ScoreError::IncompleteRun { missing });
    }

    let syllabifier = Syllabifier::default();
    let scored: Vec<_> = jobs
        .par_iter()
        .map(|(entry, outputs)| {
            let outputs = outputs.map(|_, t| t.expect("checked complete"));
            score_source(entry, &outputs, embedder, &syllabifier)
        })
        .collect::<Result<_, _>>()?;
    let mut run = ScoredRun {
        scores: Vec::with_capacity(scored.len()),
        observations: Vec::with_capacity(scored.len() * 8),
    };
    for (score, obs) in scored {
        run.scores.push(score);
        run.observations.extend(obs);
    }
    write_jsonl(&dir.join(SCORES_FILE), &run.scores)?;
    write_jsonl(&dir.join(OBSERVATIONS_FILE), &run.observations)?;
    let population = serde_json::to_string_pretty(&population_summary(&run.observations))
        .map_err(|e| StoreError::Encode(e.to_string()))?;
    let path = dir.join(POPULATION_FILE);
    std::fs::write(&path, population + "\n").map_err(|source| StoreError::Io { path, source })?;
    Ok(run)
}

/// Reads the score files written by [`score_run`].
pub fn load_scores(dir: &Path) -> Result<ScoredRun, ScoreError> {
    Ok(ScoredRun {
        scores: read_jsonl(&dir.join(SCORES_FILE))?,
        observations: read_jsonl(&dir.join(OBSERVATIONS_FILE))?,
    })
}

/// Builds the report from a scored run and exports it into `<dir>/report`.
pub fn report_run(dir: &Path, opts: &ReportOptions, export: ExportOptions) -> Result<Vec<PathBuf>, ScoreError> {
    let run = load_scores(dir)?;
    let bundle = build_report(&run.scores, &run.observations, opts);
    Ok(export_bundle(&dir.join(REPORT_DIR), &bundle, export)?)
}

fn write_jsonl<S: Serialize>(path: &Path, items: &[S]) -> Result<(), StoreError> {
    let io = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(|e| StoreError::Encode(e.to_string()))?;
        out.push(b'\n');
    }
    let mut file = std::fs::File::create(path).map_err(io)?;
    file.write_all(&out).map_err(io)?;
    file.sync_data().map_err(io)
}

fn read_jsonl<D: DeserializeOwned>(path: &Path) -> Result<Vec<D>, StoreError> {
    let io = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::open(path).map_err(io)?;
    let mut items = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
            path: path.to_path_buf(),
            line: idx + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(items)
}
