use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::warn;

use readctl_core::dataset::{corpus_fres, corpus_stats, fres_histogram, load_corpus};
use readctl_core::report::{individual_summary, ExportOptions};
use readctl_core::text::{analyze_with, Syllabifier};
use readctl_core::{classify, Band, TextAnalysisF64, TextError};
use readctl_gen::pipeline::MANIFEST_FILE;
use readctl_gen::provider::from_config;
use readctl_gen::{
    init_run, report_run, run, score_run, Embedder, HttpEmbedder, LexiconEmbedder, Mode, PipelineError, RunManifest,
    RunOptions, ScoreError,
};

use crate::config::{CliConfig, EmbeddingKind};
use crate::Failure;

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
    Ok(s)
}

fn class_line(a: &TextAnalysisF64) -> String {
    match classify(a.fres) {
        Band::In(level) => format!("{level} ({}): {}", level.grade(), level.description()),
        Band::Above => "out of range (above 100)".into(),
        Band::Below => "out of range (below 0)".into(),
    }
}

pub fn analyze(path: Option<&Path>, json: bool) -> Result<(), Failure> {
    let text = read_input(path)?;
    let a = analyze_with::<f64>(&text, &Syllabifier::default()).map_err(|e| match e {
        TextError::EmptyText => Failure::usage("input contains no words"),
    })?;
    let band = classify(a.fres);
    if json {
        let out = serde_json::json!({
            "words": a.n_words,
            "sentences": a.n_sentences,
            "syllables": a.n_syllables,
            "fres": a.fres,
            "class": band.level().map(|l| l.label()),
            "description": band.level().map(|l| l.description()),
            "out_of_range": band.is_out_of_range(),
        });
        println!("{out:#}");
    } else {
        println!("words      {}", a.n_words);
        println!("sentences  {}", a.n_sentences);
        println!("syllables  {}", a.n_syllables);
        println!("fres       {:.2}", a.fres);
        println!("class      {}", class_line(&a));
    }
    Ok(())
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::OneStep => "one-step",
        Mode::TwoStep => "two-step",
        Mode::Copy => "copy",
    }
}

fn pipeline_failure(e: PipelineError) -> Failure {
    match e {
        PipelineError::Config(_) | PipelineError::Dataset(_) => Failure::usage(e.to_string()),
        _ => Failure::runtime(e.to_string()),
    }
}

pub fn generate(config: &CliConfig, stop_after: Option<usize>) -> Result<(), Failure> {
    let corpus = config
        .corpus
        .path
        .as_deref()
        .ok_or_else(|| Failure::usage("no corpus: set corpus.path or --corpus-path"))?;
    // An absolute path lets the run be resumed or scored from any directory.
    let corpus = std::fs::canonicalize(corpus).map_err(|e| Failure::usage(format!("corpus {}: {e}", corpus.display())))?;
    let mode = config.pipeline.mode;
    let mut manifest = RunManifest::new(String::new(), &corpus, config.load_options()?, config.provider.clone(), mode)
        .map_err(pipeline_failure)?;
    manifest.targets = config.targets()?;
    manifest.garbage = config.garbage.clone();
    manifest.prompts = config.prompt_catalog()?;
    manifest.run_id = match &config.pipeline.run_id {
        Some(id) if !id.trim().is_empty() => id.trim().to_string(),
        _ => format!("{}-{}", mode_name(mode), &manifest.settings_digest()[..12]),
    };

    let provider = from_config(&config.provider).map_err(|e| Failure::usage(e.to_string()))?;
    if mode != Mode::Copy {
        provider
            .preflight()
            .map_err(|e| Failure::runtime(format!("aborted before starting: {e}")))?;
    }
    let run_dir = config.output.dir.join(&manifest.run_id);
    let manifest = init_run(&run_dir, &manifest).map_err(pipeline_failure)?;
    let mut opts = RunOptions {
        stop_after,
        ..RunOptions::default()
    };
    if config.pipeline.workers > 0 {
        opts.workers = config.pipeline.workers;
    }
    let summary = run(&run_dir, provider.as_ref(), &opts).map_err(pipeline_failure)?;
    println!("run id     {}", manifest.run_id);
    println!("directory  {}", run_dir.display());
    println!("sources    {}", summary.sources);
    println!(
        "records    {} written, {} already present, {} fallback(s)",
        summary.written, summary.already_present, summary.fallbacks
    );
    if summary.interrupted {
        println!("stopped early; run the same command again to resume");
    }
    Ok(())
}

fn run_dir(config: &CliConfig, run: &str) -> Result<PathBuf, Failure> {
    let direct = PathBuf::from(run);
    if direct.join(MANIFEST_FILE).is_file() {
        return Ok(direct);
    }
    let under = config.output.dir.join(run);
    if under.join(MANIFEST_FILE).is_file() {
        return Ok(under);
    }
    Err(Failure::usage(format!(
        "no run {run:?}: neither {} nor {} holds a manifest",
        direct.display(),
        under.display()
    )))
}

fn embedder(config: &CliConfig) -> Result<Option<Box<dyn Embedder>>, Failure> {
    let e = &config.embedding;
    Ok(match e.kind {
        EmbeddingKind::None => None,
        EmbeddingKind::LexiconFile => Some(Box::new(match &e.lexicon_path {
            Some(path) => LexiconEmbedder::from_file(path).map_err(|err| Failure::usage(err.to_string()))?,
            None => {
                warn!("no embedding.lexicon_path; semantic scores use hashed vectors and reflect exact token overlap only");
                LexiconEmbedder::hashed(e.hashed_dimension)
            }
        })),
        EmbeddingKind::HttpService => {
            let url = e
                .url
                .as_deref()
                .ok_or_else(|| Failure::usage("embedding.kind is http-service but embedding.url is unset"))?;
            if !(e.timeout_secs > 0.0 && e.timeout_secs.is_finite()) {
                return Err(Failure::usage("embedding.timeout_secs must be positive"));
            }
            let client = HttpEmbedder::connect(url, e.model.as_deref(), Duration::from_secs_f64(e.timeout_secs))
                .map_err(|err| Failure::runtime(format!("embedding service: {err}")))?;
            Some(Box::new(client))
        }
    })
}

pub fn score(config: &CliConfig, run: &str) -> Result<(), Failure> {
    let dir = run_dir(config, run)?;
    let embedder = embedder(config)?;
    let scored = score_run(&dir, embedder.as_deref()).map_err(|e| match e {
        ScoreError::Run(p) => pipeline_failure(p),
        other => Failure::runtime(other.to_string()),
    })?;
    println!("sources    {}", scored.scores.len());
    println!("pairs      {}", scored.observations.len());
    if let Some(s) = individual_summary(&scored.scores) {
        println!(
            "rho x100   {:.1} ± {:.1}",
            s.spearman_rho.mean * 100.0,
            s.spearman_rho.std * 100.0
        );
        println!("rmse       {:.1} ± {:.1}", s.rmse.mean, s.rmse.std);
        println!("acc x100   {:.1} ± {:.1}", s.accuracy.mean * 100.0, s.accuracy.std * 100.0);
    }
    println!("directory  {}", dir.display());
    Ok(())
}

pub fn report(config: &CliConfig, run: &str) -> Result<(), Failure> {
    let dir = run_dir(config, run)?;
    let opts = config.report_options()?;
    let files = report_run(&dir, &opts, ExportOptions { svg: config.metrics.svg }).map_err(|e| match e {
        ScoreError::Storage(_) => Failure::runtime(format!("{e} (has the run been scored?)")),
        other => Failure::runtime(other.to_string()),
    })?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

pub fn stats(config: &CliConfig, json: bool) -> Result<(), Failure> {
    let path = config
        .corpus
        .path
        .as_deref()
        .ok_or_else(|| Failure::usage("no corpus: set corpus.path or --corpus-path"))?;
    let corpus = load_corpus(path, &config.load_options()?).map_err(|e| Failure::usage(e.to_string()))?;
    let stats = corpus_stats::<f64>(&corpus.entries).ok_or_else(|| Failure::usage("corpus has no entries"))?;
    let scores: Vec<f64> = corpus_fres::<f64>(&corpus.entries, &Syllabifier::default())
        .into_iter()
        .map(|(_, f)| f)
        .collect();
    let opts = config.report_options()?;
    let histogram = fres_histogram(&scores, opts.bin_width, None);
    if json {
        let out = serde_json::json!({
            "stats": stats,
            "skipped_empty": corpus.skipped_empty,
            "histogram": histogram,
        });
        println!("{out:#}");
        return Ok(());
    }
    println!("entries     {} ({} empty row(s) skipped)", stats.entries, corpus.skipped_empty);
    println!("words       {:.1} ± {:.1}", stats.words.mean, stats.words.std);
    println!("sentences   {:.1} ± {:.1}", stats.sentences.mean, stats.sentences.std);
    println!("paragraphs  {:.1} ± {:.1}", stats.paragraphs.mean, stats.paragraphs.std);
    println!();
    println!("fres histogram");
    let peak = histogram.counts.iter().copied().max().unwrap_or(0).max(1);
    for (k, &count) in histogram.counts.iter().enumerate() {
        let (lo, hi) = histogram.bin_range(k);
        let bar = "#".repeat((count * 50).div_ceil(peak));
        println!("[{lo:>6.1}, {hi:>6.1})  {count:>6}  {bar}");
    }
    Ok(())
}
