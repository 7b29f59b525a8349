//! Offline rewriter that steers a passage's reading ease toward a target by
//! local edits: synonym swaps, sentence splits and sentence merges.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use readctl_core::text::{analyze, count_syllables, fres_from_counts, segment_sentences, tokenize, Token};
use readctl_core::{Level, LexiconError};

const BUILTIN_SYNONYMS: &str = include_str!("../data/synonyms.tsv");

/// Conjunctions dropped when a sentence is split in front of them.
const SPLIT_CONJUNCTIONS: [&str; 4] = ["and", "but", "so", "yet"];

/// Undirected synonym table: every listed pair can be swapped either way.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymLexicon {
    map: BTreeMap<String, Vec<String>>,
}

impl SynonymLexicon {
    /// Parses `word<TAB>replacement` lines; `#` starts a comment line.
    pub fn parse(src: &str) -> Result<Self, LexiconError> {
        let mut sets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (idx, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: &str| LexiconError::Malformed {
                line: idx + 1,
                reason: reason.into(),
            };
            let (a, b) = line.split_once('\t').ok_or_else(|| malformed("expected word<TAB>replacement"))?;
            let (a, b) = (a.trim().to_lowercase(), b.trim().to_lowercase());
            let single = |w: &str| tokenize(w).len() == 1 && tokenize(w)[0].text.len() == w.len();
            if !single(&a) || !single(&b) {
                return Err(malformed("entries must be single words"));
            }
            if a == b {
                continue;
            }
            sets.entry(a.clone()).or_default().insert(b.clone());
            sets.entry(b).or_default().insert(a);
        }
        Ok(SynonymLexicon {
            map: sets.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, LexiconError> {
        let src = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&src)
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static SynonymLexicon {
        static LEXICON: OnceLock<SynonymLexicon> = OnceLock::new();
        LEXICON.get_or_init(|| SynonymLexicon::parse(BUILTIN_SYNONYMS).expect("built-in synonym table parses"))
    }

    pub fn alternatives(&self, word: &str) -> &[String] {
        self.map.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of distinct words with at least one synonym.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewriteOptions {
    /// Stop once the score is within this distance of the target.
    pub tolerance: f64,
    /// Maximum number of sweeps over the sentences.
    pub max_iterations: usize,
}

impl Default for RewriteOptions {
    fn default() -> Self {
        RewriteOptions {
            tolerance: 4.0,
            max_iterations: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewriteOutcome {
    pub text: String,
    pub start_fres: f64,
    pub final_fres: f64,
    /// Sweeps performed; 0 when the input was already within tolerance.
    pub iterations: usize,
    /// Accepted edits. Each one strictly reduced the distance to the target.
    pub edits: usize,
}

/// Rewrites `text` toward the class midpoint of `level` with the built-in
/// synonym table. Deterministic in `(text, level, seed)`.
pub fn mock_rewrite(text: &str, level: Level, seed: u64) -> String {
    rewrite_toward(text, level.target(), seed, SynonymLexicon::builtin(), RewriteOptions::default()).text
}

#[derive(Debug, Clone)]
enum Edit {
    Replace { token: usize, with: String },
    /// Ends a sentence after `token`; `drop` removes the conjunction that follows.
    Split { token: usize, drop: bool },
    /// Joins the sentence ending at `token` to the next one.
    Merge { token: usize, conjunction: bool },
}

struct Counts {
    words: usize,
    sentences: usize,
    syllables: usize,
}

impl Counts {
    fn shifted(&self, dw: isize, dse: isize, dsy: isize) -> Option<f64> {
        let w = self.words.checked_add_signed(dw)?;
        let se = self.sentences.checked_add_signed(dse)?;
        let sy = self.syllables.checked_add_signed(dsy)?;
        (w > 0 && se > 0).then(|| fres_from_counts(w, se, sy))
    }
}

fn syllables(word: &str) -> isize {
    count_syllables(word) as isize
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn starts_upper(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

/// Words that appear capitalized away from a sentence start, such as names.
fn capitalized_inside(tokens: &[Token<'_>], spans: &[std::ops::Range<usize>]) -> BTreeSet<String> {
    spans
        .iter()
        .flat_map(|r| r.clone().skip(1))
        .filter(|&i| starts_upper(tokens[i].text))
        .map(|i| tokens[i].text.to_lowercase())
        .collect()
}

fn keeps_capital(word: &str, proper: &BTreeSet<String>) -> bool {
    word == "I" || word.starts_with("I'") || word.chars().skip(1).any(char::is_uppercase) || proper.contains(&word.to_lowercase())
}

fn seed_rng(text: &str, target: f64, seed: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(target.to_bits().to_le_bytes());
    h.update(text.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(bytes)
}

struct Parsed<'a> {
    text: &'a str,
    tokens: Vec<Token<'a>>,
    spans: Vec<std::ops::Range<usize>>,
}

impl<'a> Parsed<'a> {
    fn new(text: &'a str) -> Self {
        let tokens = tokenize(text);
        let spans = segment_sentences(text, &tokens);
        Parsed { text, tokens, spans }
    }

    fn gap(&self, i: usize) -> &str {
        &self.text[self.tokens[i].end..self.tokens[i + 1].start]
    }

    fn candidates(&self, s: usize, lexicon: &SynonymLexicon) -> Vec<(Edit, isize, isize, isize)> {
        let span = self.spans[s].clone();
        let mut out = Vec::new();
        for i in span.clone() {
            let word = self.tokens[i].text;
            if word.chars().skip(1).any(char::is_uppercase) {
                continue;
            }
            let lower = word.to_lowercase();
            for alt in lexicon.alternatives(&lower) {
                let with = if starts_upper(word) { capitalize(alt) } else { alt.clone() };
                out.push((Edit::Replace { token: i, with }, 0, 0, syllables(alt) - syllables(word)));
            }
        }
        // Splits keep at least three words on each side.
        for i in span.start + 2..span.end.saturating_sub(3) {
            let next = self.tokens[i + 1].text;
            let gap = self.gap(i).trim();
            if matches!(gap, "," | ";") && !self.tokens[i + 1].is_numeric() {
                out.push((Edit::Split { token: i, drop: false }, 0, 1, 0));
            }
            if matches!(gap, "," | "")
                && !self.gap(i).is_empty()
                && SPLIT_CONJUNCTIONS.contains(&next.to_lowercase().as_str())
                && i + 2 < span.end - 2
                && self.gap(i + 1).trim().is_empty()
                && !self.tokens[i + 2].is_numeric()
            {
                out.push((Edit::Split { token: i, drop: true }, -1, 1, -syllables(next)));
            }
        }
        if s + 1 < self.spans.len() {
            let last = span.end - 1;
            let gap = self.gap(last);
            if gap.trim() == "." && !gap.contains('\n') {
                let next = self.tokens[last + 1].text.to_lowercase();
                if SPLIT_CONJUNCTIONS.contains(&next.as_str()) {
                    out.push((Edit::Merge { token: last, conjunction: false }, 0, -1, 0));
                } else {
                    out.push((Edit::Merge { token: last, conjunction: true }, 1, -1, 1));
                }
            }
        }
        out
    }

    fn apply(&self, edit: &Edit) -> String {
        let t = &self.tokens;
        let text = self.text;
        match edit {
            Edit::Replace { token, with } => {
                format!("{}{}{}", &text[..t[*token].start], with, &text[t[*token].end..])
            }
            Edit::Split { token, drop } => {
                let resume = if *drop { token + 2 } else { token + 1 };
                let rest = &text[t[resume].start..];
                let head = &text[t[resume].start..t[resume].end];
                format!("{}. {}{}", &text[..t[*token].end], capitalize(head), &rest[head.len()..])
            }
            Edit::Merge { token, conjunction } => {
                let next = t[token + 1];
                let proper = capitalized_inside(t, &self.spans);
                let word = if keeps_capital(next.text, &proper) {
                    next.text.to_string()
                } else {
                    next.text.to_lowercase()
                };
                let joiner = if *conjunction { ", and " } else { ", " };
                format!("{}{}{}{}", &text[..t[*token].end], joiner, word, &text[next.end..])
            }
        }
    }
}

/// Greedy local search toward `target`.
///
/// Each sweep visits the sentences in order and, per sentence, applies the
/// candidate edit whose predicted score lands closest to the target,
/// provided the re-measured score is strictly closer than before. Ties are
/// broken by a generator seeded from the inputs. Stops within tolerance,
/// after `max_iterations` sweeps, or when a sweep changes nothing.
pub fn rewrite_toward(
    text: &str,
    target: f64,
    seed: u64,
    lexicon: &SynonymLexicon,
    opts: RewriteOptions,
) -> RewriteOutcome {
    let Ok(start) = analyze::<f64>(text) else {
        return RewriteOutcome {
            text: text.to_string(),
            start_fres: f64::NAN,
            final_fres: f64::NAN,
            iterations: 0,
            edits: 0,
        };
    };
    let mut rng = seed_rng(text, target, seed);
    let mut current = text.to_string();
    let mut fres = start.fres;
    let mut counts = Counts {
        words: start.n_words,
        sentences: start.n_sentences,
        syllables: start.n_syllables,
    };
    let (mut iterations, mut edits) = (0, 0);

    'sweeps: while iterations < opts.max_iterations && (fres - target).abs() > opts.tolerance {
        iterations += 1;
        let mut changed = false;
        let mut s = 0;
        loop {
            let dist = (fres - target).abs();
            if dist <= opts.tolerance {
                break 'sweeps;
            }
            let parsed = Parsed::new(&current);
            if s >= parsed.spans.len() {
                break;
            }
            let mut scored: Vec<(f64, Edit)> = parsed
                .candidates(s, lexicon)
                .into_iter()
                .filter_map(|(edit, dw, dse, dsy)| {
                    let predicted = counts.shifted(dw, dse, dsy)?;
                    let d = (predicted - target).abs();
                    (d < dist).then_some((d, edit))
                })
                .collect();
            scored.shuffle(&mut rng);
            scored.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut accepted = None;
            for (_, edit) in scored.iter().take(3) {
                let candidate = parsed.apply(edit);
                if let Ok(a) = analyze::<f64>(&candidate) {
                    if (a.fres - target).abs() < dist {
                        accepted = Some((candidate, a));
                        break;
                    }
                }
            }
            if let Some((candidate, a)) = accepted {
                current = candidate;
                fres = a.fres;
                counts = Counts {
                    words: a.n_words,
                    sentences: a.n_sentences,
                    syllables: a.n_syllables,
                };
                edits += 1;
                changed = true;
            }
            s += 1;
        }
        if !changed {
            break;
        }
    }
    RewriteOutcome {
        text: current,
        start_fres: start.fres,
        final_fres: fres,
        iterations,
        edits,
    }
}
