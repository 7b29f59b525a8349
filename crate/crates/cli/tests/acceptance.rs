//! Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//!
//! Every derived quantity is compared against a reference computed here,
//! independently of the library code under test. Set `READCTL_CLEAR_PATH`
//! (and optionally `READCTL_CLEAR_TEXT_COLUMN`, default `Excerpt`) to run
//! the corpus-statistics criterion against a local copy of CLEAR.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use readctl_core::dataset::{corpus_stats, load_corpus, write_corpus, CorpusEntry, LoadOptions};
use readctl_core::metrics::{ols_fit, pearson, rank_correlation, score_example, self_wer, semantic_score};
use readctl_core::report::{population_summary, ExportOptions, ReportOptions};
use readctl_core::text::{analyze, fres};
use readctl_core::{classify, Band, Level, LevelMap};
use readctl_gen::pipeline::RECORDS_FILE;
use readctl_gen::store::read_records;
use readctl_gen::synth::{synthetic_corpus, synthetic_passage};
use readctl_gen::{
    init_run, report_run, run, score_run, GenerationRecord, LexiconEmbedder, MockProvider, Mode, ProviderConfig,
    RunManifest, RunOptions, ScoredRun,
};

const FRES_GOLDEN: f64 = 74.5;
const FRES_GOLDEN_TOL: f64 = 2.0;
const GOLDEN_RUNTIME: Duration = Duration::from_secs(1);
const HAND_ORACLE: f64 = 121.22;
const HAND_ORACLE_TOL: f64 = 1e-9;
const EXACT_TOL: f64 = 1e-9;
const COPY_PASSAGES: usize = 1000;
const METRIC_CASES: usize = 500;
const WER_CASES: usize = 10_000;
const SEMANTIC_CASES: usize = 1000;
const MOCK_PASSAGES: usize = 50;
const MOCK_MIN_RHO: f64 = 0.95;
const MOCK_MIN_ACCURACY: f64 = 0.80;
const MOCK_RUNTIME: Duration = Duration::from_secs(60);
const CLEAR_ENTRIES: usize = 4724;
const CLEAR_WORDS: (f64, f64) = (179.0, 5.0);
const CLEAR_SENTENCES: (f64, f64) = (9.6, 1.0);
const CLEAR_COPY_RMSE: (f64, f64) = (35.4, 2.0);

const APPENDIX_SOURCE: &str = "When the young people returned to the ballroom, it presented a decidedly changed appearance. Instead of an interior scene, it was a winter landscape. The floor was covered with snow-white canvas, not laid on smoothly, but rumpled over bumps and hillocks, like a real snow field. The numerous palms and evergreens that had decorated the room, were powdered with flour and strewn with tufts of cotton, like snow. Also diamond dust had been lightly sprinkled on them, and glittering crystal icicles hung from the branches. At each end of the room, on the wall, hung a beautiful bear-skin rug. These rugs were for prizes, one for the girls and one for the boys. And this was the game. The girls were gathered at one end of the room and the boys at the other, and one end was called the North Pole, and the other the South Pole. Each player was given a small flag which they were to plant on reaching the Pole. This would have been an easy matter, but each traveller was obliged to wear snowshoes.";

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

#[derive(Default)]
struct Tally {
    pass: usize,
    fail: usize,
    skip: usize,
}

impl Tally {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Outcome::Fail(format!("panic: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => {
                self.pass += 1;
                ("PASS", d)
            }
            Outcome::Fail(d) => {
                self.fail += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => {
                self.skip += 1;
                ("SKIP", d)
            }
        };
        println!("{tag} {name} ({secs:.2}s): {detail}");
    }
}

// Reference implementations.

/// Reading ease straight from the three counts.
fn fres_formula(words: f64, sentences: f64, syllables: f64) -> f64 {
    206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words)
}

/// Table boundaries, written out independently of the library.
const BOUNDS: [(f64, f64, u8); 8] = [
    (0.0, 10.0, 5),
    (10.0, 30.0, 20),
    (30.0, 50.0, 40),
    (50.0, 60.0, 55),
    (60.0, 70.0, 65),
    (70.0, 80.0, 75),
    (80.0, 90.0, 85),
    (90.0, 100.0, 95),
];

fn ref_class(v: f64) -> Option<u8> {
    BOUNDS
        .iter()
        .find(|&&(lo, hi, _)| v >= lo && (v < hi || (hi == 100.0 && v <= hi)))
        .map(|b| b.2)
}

/// Rank of each value: one plus the number of smaller values plus half the
/// number of other equal values.
fn ref_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Pearson from raw sums.
fn ref_pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx = xs.iter().map(|x| x * x).sum::<f64>() - sx * sx / n;
    let syy = ys.iter().map(|y| y * y).sum::<f64>() - sy * sy / n;
    let sxy = xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>() - sx * sy / n;
    (sxx > 1e-12 && syy > 1e-12).then(|| sxy / (sxx * syy).sqrt())
}

/// Least squares by solving the 2x2 normal equations with Cramer's rule.
fn ref_ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx = xs.iter().map(|x| x * x).sum::<f64>();
    let sxy = xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let mean = sy / n;
    let sst: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    (slope, intercept, 1.0 - sse / sst)
}

/// Edit distance by memoised recursion over suffixes.
fn ref_edit_distance(a: &[u8], b: &[u8], memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    if let Some(&d) = memo.get(&(a.len(), b.len())) {
        return d;
    }
    let d = if a[0] == b[0] {
        ref_edit_distance(&a[1..], &b[1..], memo)
    } else {
        1 + ref_edit_distance(&a[1..], b, memo)
            .min(ref_edit_distance(a, &b[1..], memo))
            .min(ref_edit_distance(&a[1..], &b[1..], memo))
    };
    memo.insert((a.len(), b.len()), d);
    d
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Precision, recall and F1 from the full cosine matrix.
fn ref_semantic(src: &[Vec<f64>], gen: &[Vec<f64>]) -> (f64, f64, f64) {
    let matrix: Vec<Vec<f64>> = src.iter().map(|s| gen.iter().map(|g| cosine(s, g)).collect()).collect();
    let recall = matrix
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / src.len() as f64;
    let precision = (0..gen.len())
        .map(|j| matrix.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / gen.len() as f64;
    let f1 = if precision > 0.0 && recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, recall, f1)
}

// Shared helpers.

fn id_load() -> LoadOptions {
    LoadOptions {
        id_column: Some("id".into()),
        ..LoadOptions::default()
    }
}

fn start_run(dir: &Path, corpus: &[CorpusEntry], mode: Mode, seed: u64) -> std::path::PathBuf {
    std::fs::create_dir_all(dir).unwrap();
    let path = dir.join("corpus.csv");
    write_corpus(&path, corpus, b',').unwrap();
    let manifest = RunManifest::new("acceptance", &path, id_load(), ProviderConfig::mock(seed), mode).unwrap();
    let run_dir = dir.join("run");
    init_run(&run_dir, &manifest).unwrap();
    run_dir
}

fn workers() -> RunOptions {
    RunOptions::default()
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Passages whose score lies in [0, 100).
fn in_range_passages(n: usize, seed: u64) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let target = 2.0 + 95.0 * out.len() as f64 / n as f64;
        let (text, f) = synthetic_passage(target, 30, &mut rng);
        if (0.0..100.0).contains(&f) {
            out.push(CorpusEntry::new(format!("p{:04}", out.len()), text));
        }
    }
    out
}

// Criteria.

fn fres_golden() -> Outcome {
    let started = Instant::now();
    let a = analyze::<f64>(APPENDIX_SOURCE).unwrap();
    let elapsed = started.elapsed();
    let by_counts = fres_formula(a.n_words as f64, a.n_sentences as f64, a.n_syllables as f64);
    verdict(
        (a.fres - FRES_GOLDEN).abs() <= FRES_GOLDEN_TOL && (a.fres - by_counts).abs() < 1e-12 && elapsed < GOLDEN_RUNTIME,
        format!(
            "fres {:.3} (expected {FRES_GOLDEN} ± {FRES_GOLDEN_TOL}), {} words / {} sentences / {} syllables, {:.1} ms",
            a.fres,
            a.n_words,
            a.n_sentences,
            a.n_syllables,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn fres_hand_oracle() -> Outcome {
    let f = fres::<f64>("Go. Run.").unwrap();
    let hand = fres_formula(2.0, 2.0, 2.0);
    verdict(
        (f - HAND_ORACLE).abs() <= HAND_ORACLE_TOL && (hand - HAND_ORACLE).abs() <= HAND_ORACLE_TOL && classify(f) == Band::Above,
        format!("{f:.12} vs {HAND_ORACLE} (hand formula {hand:.12}), classified above range"),
    )
}

fn partition() -> Outcome {
    let mut bad = Vec::new();
    for i in 0..=10_000u32 {
        let v = f64::from(i) / 100.0;
        let got = classify(v).level().map(|l| l.label());
        if got != ref_class(v) {
            bad.push(v);
        }
    }
    let midpoints_ok = Level::ALL.iter().zip(BOUNDS).all(|(l, (lo, hi, label))| {
        l.label() == label && f64::from(label) == (lo + hi) / 2.0 && l.lower() == lo && l.upper() == hi
    });
    verdict(
        bad.is_empty() && midpoints_ok,
        format!("10001 values, {} misclassified, labels are midpoints: {midpoints_ok}", bad.len()),
    )
}

fn copy_baseline() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = in_range_passages(COPY_PASSAGES, 1);
    let run_dir = start_run(tmp.path(), &corpus, Mode::Copy, 0);
    run(&run_dir, &MockProvider::new(0), &workers()).unwrap();
    let ScoredRun { scores, observations } = score_run(&run_dir, None).unwrap();

    let mut worst_rmse = 0.0f64;
    let mut bad_acc = 0;
    let mut bad_rho = 0;
    for s in &scores {
        let f = s.source_fres;
        let closed = (BOUNDS.iter().map(|b| (f - f64::from(b.2)).powi(2)).sum::<f64>() / 8.0).sqrt();
        worst_rmse = worst_rmse.max((s.rmse - closed).abs());
        bad_acc += usize::from(s.accuracy != 0.125);
        bad_rho += usize::from(s.spearman_rho != 0.0);
    }
    let population = population_summary(&observations);
    let source = population.source;
    let mut worst_fit = 0.0f64;
    for row in &population.rows {
        let fit = row.fit.expect("copy fits are defined");
        for (a, b) in [
            (fit.pcc, source.pcc),
            (fit.slope, source.slope),
            (fit.intercept, source.intercept),
            (fit.r_squared, source.r_squared),
        ] {
            worst_fit = worst_fit.max((a - b).abs());
        }
    }
    let source_ok = source.pcc == 1.0 && source.slope == 1.0 && source.intercept == 0.0 && source.r_squared == 1.0;
    verdict(
        scores.len() == COPY_PASSAGES
            && bad_acc == 0
            && bad_rho == 0
            && worst_rmse <= EXACT_TOL
            && worst_fit <= EXACT_TOL
            && source_ok,
        format!(
            "{} passages: accuracy != 1/8 in {bad_acc}, rho != 0 in {bad_rho}, max rmse error {worst_rmse:.1e}, \
             max population deviation from source row {worst_fit:.1e}",
            scores.len()
        ),
    )
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut worst_r2 = 0.0f64;
    let mut degenerate = 0;
    for case in 0..METRIC_CASES {
        let n = rng.gen_range(3..=50);
        // Every fourth case draws small integers so ties are common.
        let draw = |rng: &mut ChaCha8Rng| -> f64 {
            if case % 4 == 0 {
                f64::from(rng.gen_range(0..6))
            } else {
                rng.gen_range(-100.0..100.0)
            }
        };
        let xs: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let ys: Vec<f64> = (0..n).map(|_| draw(&mut rng) + 0.5 * xs[0]).collect();

        let rho = rank_correlation(&xs, &ys).unwrap();
        let want_rho = ref_pearson(&ref_ranks(&xs), &ref_ranks(&ys)).unwrap_or(0.0);
        worst = worst.max((rho - want_rho).abs());

        match (ref_pearson(&xs, &ys), pearson(&xs, &ys), ols_fit(&xs, &ys)) {
            (Some(want), Ok(got), Ok(fit)) => {
                let (slope, intercept, r2) = ref_ols(&xs, &ys);
                for d in [got - want, fit.pcc - want, fit.slope - slope, fit.intercept - intercept, fit.r_squared - r2] {
                    worst = worst.max(d.abs());
                }
                worst_r2 = worst_r2.max((fit.r_squared - fit.pcc * fit.pcc).abs());
            }
            (None, Err(_), Err(_)) => degenerate += 1,
            _ => return Outcome::Fail(format!("case {case}: library and reference disagree on degeneracy")),
        }
    }
    verdict(
        worst <= EXACT_TOL && worst_r2 <= EXACT_TOL,
        format!("{METRIC_CASES} cases ({degenerate} degenerate): max deviation {worst:.1e}, max |r2 - pcc^2| {worst_r2:.1e}"),
    )
}

fn wer_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let words = ["a", "b", "c", "d"];
    let mut mismatches = 0;
    for _ in 0..WER_CASES {
        let src: Vec<u8> = (0..rng.gen_range(1..=8)).map(|_| rng.gen_range(0..4)).collect();
        let gen: Vec<u8> = (0..rng.gen_range(0..=8)).map(|_| rng.gen_range(0..4)).collect();
        let as_words = |v: &[u8]| -> Vec<&str> { v.iter().map(|&i| words[i as usize]).collect() };
        let got = self_wer::<f64, _>(&as_words(&src), &as_words(&gen)).unwrap();
        let want = ref_edit_distance(&src, &gen, &mut HashMap::new()) as f64 / src.len() as f64;
        mismatches += usize::from(got != want);
    }
    verdict(mismatches == 0, format!("{WER_CASES} random pairs up to 8 tokens, {mismatches} mismatches"))
}

fn semantic_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..SEMANTIC_CASES {
        let d = rng.gen_range(1..=16);
        let set = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
            let n = rng.gen_range(1..=12);
            (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
        };
        let src = set(&mut rng);
        let gen = set(&mut rng);
        let s = semantic_score::<f64, _>(&src, &gen).unwrap();
        let (p, r, f) = ref_semantic(&src, &gen);
        worst = worst.max((s.precision - p).abs()).max((s.recall - r).abs()).max((s.f1 - f).abs());
    }
    let x: Vec<Vec<f64>> = (0..6).map(|i| (0..16).map(|j| ((i * 7 + j) as f64).sin()).collect()).collect();
    let id = semantic_score::<f64, _>(&x, &x).unwrap();
    let identity = (id.precision - 1.0).abs() < EXACT_TOL && (id.recall - 1.0).abs() < EXACT_TOL && (id.f1 - 1.0).abs() < EXACT_TOL;
    let unit = |k: usize| -> Vec<f64> { (0..4).map(|j| f64::from(u8::from(j == k))).collect() };
    let o = semantic_score::<f64, _>(&[unit(0), unit(1)], &[unit(2), unit(3)]).unwrap();
    let orthogonal = o.precision == 0.0 && o.recall == 0.0 && o.f1 == 0.0;
    verdict(
        worst <= EXACT_TOL && identity && orthogonal,
        format!("{SEMANTIC_CASES} sets, max deviation {worst:.1e}, identity (1,1,1): {identity}, orthogonal (0,0,0): {orthogonal}"),
    )
}

fn mock_end_to_end() -> Outcome {
    let started = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synthetic_corpus(MOCK_PASSAGES, 10.0, 95.0, 120, 5);
    let one = start_run(&tmp.path().join("one"), &corpus, Mode::OneStep, 0);
    run(&one, &MockProvider::new(0), &workers()).unwrap();
    let one = score_run(&one, None).unwrap();
    let two = start_run(&tmp.path().join("two"), &corpus, Mode::TwoStep, 0);
    run(&two, &MockProvider::new(0), &workers()).unwrap();
    let two = score_run(&two, None).unwrap();
    let elapsed = started.elapsed();

    let rho = mean(one.scores.iter().map(|s| s.spearman_rho));
    let acc = mean(one.scores.iter().map(|s| s.accuracy));
    let rmse1 = mean(one.scores.iter().map(|s| s.rmse));
    let rmse2 = mean(two.scores.iter().map(|s| s.rmse));
    // Recompute the one-step scores from the observations as a cross-check.
    let mut by_source: HashMap<&str, [f64; 8]> = HashMap::new();
    for o in &one.observations {
        by_source.entry(&o.source_id).or_default()[o.target.index()] = o.generated_fres;
    }
    let ref_acc = mean(by_source.values().map(|g| {
        g.iter().zip(BOUNDS).filter(|(f, b)| ref_class(**f) == Some(b.2)).count() as f64 / 8.0
    }));
    verdict(
        rho >= MOCK_MIN_RHO
            && acc >= MOCK_MIN_ACCURACY
            && (acc - ref_acc).abs() < EXACT_TOL
            && rmse2 <= rmse1
            && elapsed < MOCK_RUNTIME,
        format!(
            "{MOCK_PASSAGES} passages: mean rho {rho:.3} (>= {MOCK_MIN_RHO}), mean accuracy {acc:.3} (>= {MOCK_MIN_ACCURACY}), \
             rmse one-step {rmse1:.2} vs two-step {rmse2:.2}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn sorted_store(run_dir: &Path) -> Vec<String> {
    let mut recs: Vec<GenerationRecord> = read_records(&run_dir.join(RECORDS_FILE)).unwrap();
    recs.sort_by_key(GenerationRecord::key);
    recs.iter().map(|r| serde_json::to_string(r).unwrap()).collect()
}

fn crash_recovery() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synthetic_corpus(10, 15.0, 90.0, 60, 6);
    let clean = start_run(&tmp.path().join("clean"), &corpus, Mode::TwoStep, 7);
    run(&clean, &MockProvider::new(7), &workers()).unwrap();

    let total = corpus.len() * 16;
    let seed = std::env::var("READCTL_CRASH_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| {
            let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap();
            now.as_nanos() as u64 ^ u64::from(std::process::id())
        });
    let cut = ChaCha8Rng::seed_from_u64(seed).gen_range(1..total);
    let resumed = start_run(&tmp.path().join("resumed"), &corpus, Mode::TwoStep, 7);
    let first = run(
        &resumed,
        &MockProvider::new(7),
        &RunOptions {
            stop_after: Some(cut),
            ..workers()
        },
    )
    .unwrap();
    // A kill can also leave half a line behind.
    let store = resumed.join(RECORDS_FILE);
    let mut bytes = std::fs::read(&store).unwrap();
    let tail = serde_json::to_vec(&read_records(&clean.join(RECORDS_FILE)).unwrap()[0]).unwrap();
    bytes.extend_from_slice(&tail[..tail.len() / 2]);
    std::fs::write(&store, bytes).unwrap();
    let second = run(&resumed, &MockProvider::new(7), &workers()).unwrap();

    let (a, b) = (sorted_store(&clean), sorted_store(&resumed));
    verdict(
        first.interrupted && first.written == cut && second.written == total - cut && a == b,
        format!(
            "cut after {cut}/{total} records (seed {seed}) plus a torn line; resumed store {} the clean run",
            if a == b { "equals" } else { "differs from" }
        ),
    )
}

fn clear_stats() -> Outcome {
    let Ok(path) = std::env::var("READCTL_CLEAR_PATH") else {
        return Outcome::Skip("READCTL_CLEAR_PATH not set; CLEAR is not bundled".into());
    };
    let opts = LoadOptions {
        text_column: std::env::var("READCTL_CLEAR_TEXT_COLUMN").unwrap_or_else(|_| "Excerpt".into()),
        ..LoadOptions::default()
    };
    let corpus = load_corpus(Path::new(&path), &opts).unwrap();
    let stats = corpus_stats::<f64>(&corpus.entries).unwrap();
    let rmse = mean(corpus.entries.iter().map(|e| {
        let a = analyze::<f64>(&e.text).unwrap();
        score_example(&e.source_id, &a, &LevelMap::from_fn(|_| e.text.as_str())).rmse
    }));
    let within = |v: f64, (c, tol): (f64, f64)| (v - c).abs() <= tol;
    verdict(
        stats.entries == CLEAR_ENTRIES
            && within(stats.words.mean, CLEAR_WORDS)
            && within(stats.sentences.mean, CLEAR_SENTENCES)
            && within(rmse, CLEAR_COPY_RMSE),
        format!(
            "{} entries (expected {CLEAR_ENTRIES}), words {:.1} (expected {} ± {}), sentences {:.2} (expected {} ± {}), \
             copy rmse {rmse:.2} (expected {} ± {})",
            stats.entries,
            stats.words.mean,
            CLEAR_WORDS.0,
            CLEAR_WORDS.1,
            stats.sentences.mean,
            CLEAR_SENTENCES.0,
            CLEAR_SENTENCES.1,
            CLEAR_COPY_RMSE.0,
            CLEAR_COPY_RMSE.1
        ),
    )
}

fn report_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synthetic_corpus(30, 10.0, 95.0, 60, 8);
    let run_dir = start_run(tmp.path(), &corpus, Mode::OneStep, 2);
    run(&run_dir, &MockProvider::new(2), &workers()).unwrap();
    let embedder = LexiconEmbedder::hashed(16);
    let snapshot = || -> Vec<(String, Vec<u8>)> {
        score_run(&run_dir, Some(&embedder)).unwrap();
        let mut files: Vec<std::path::PathBuf> = report_run(&run_dir, &ReportOptions::default(), ExportOptions { svg: true }).unwrap();
        files.extend(["example_scores.jsonl", "observations.jsonl", "population.json"].map(|f| run_dir.join(f)));
        files
            .into_iter()
            .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "json" | "jsonl")))
            .map(|p| (p.display().to_string(), std::fs::read(&p).unwrap()))
            .collect()
    };
    let a = snapshot();
    let b = snapshot();
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count();
    verdict(
        a.len() == b.len() && differing == 0 && a.len() > 10,
        format!("{} CSV/JSON files written twice, {differing} differ", a.len()),
    )
}

fn main() -> ExitCode {
    let mut tally = Tally::default();
    tally.check("fres-golden", fres_golden);
    tally.check("fres-hand-oracle", fres_hand_oracle);
    tally.check("partition", partition);
    tally.check("copy-baseline", copy_baseline);
    tally.check("metric-oracles", metric_oracles);
    tally.check("wer-oracle", wer_oracle);
    tally.check("semantic-oracle", semantic_oracle);
    tally.check("mock-end-to-end", mock_end_to_end);
    tally.check("crash-recovery", crash_recovery);
    tally.check("clear-stats", clear_stats);
    tally.check("report-determinism", report_determinism);
    println!("{} passed, {} failed, {} skipped", tally.pass, tally.fail, tally.skip);
    if tally.fail == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
