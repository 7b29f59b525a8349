//! Corpus ingestion, corpus statistics and score histograms.
//!
//! Delimited files follow RFC 4180 (quoted fields may span lines). A
//! directory is read as one passage per `.txt` file, keyed by file stem.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::DatasetError;
use crate::scalar::Scalar;
use crate::text::{analyze_with, segment_sentences, tokenize, Syllabifier};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub source_id: String,
    pub text: String,
    /// Remaining columns of the source row, carried through untouched.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fields: BTreeMap<String, String>,
}

impl CorpusEntry {
    pub fn new(source_id: impl Into<String>, text: impl Into<String>) -> Self {
        CorpusEntry {
            source_id: source_id.into(),
            text: text.into(),
            fields: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub text_column: String,
    pub id_column: Option<String>,
    pub delimiter: u8,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            text_column: "text".into(),
            id_column: None,
            delimiter: b',',
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    /// Rows dropped because their text was blank.
    pub skipped_empty: usize,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a delimited file, or a directory of `.txt` files.
pub fn load_corpus(path: &Path, opts: &LoadOptions) -> Result<Corpus, DatasetError> {
    if path.is_dir() {
        return load_text_dir(path);
    }
    let file = fs::File::open(path).map_err(io_err(path))?;
    load_delimited(file, opts)
}

pub fn load_delimited<R: Read>(reader: R, opts: &LoadOptions) -> Result<Corpus, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| DatasetError::MalformedRow {
            row: 0,
            reason: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| DatasetError::MissingColumn {
            name: name.to_string(),
            available: headers.clone(),
        })
    };
    let text_idx = find(&opts.text_column)?;
    let id_idx = opts.id_column.as_deref().map(find).transpose()?;

    let mut corpus = Corpus::default();
    let mut seen = HashSet::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| DatasetError::MalformedRow {
            row: e.position().map_or(row + 1, |p| p.record() as usize),
            reason: e.to_string(),
        })?;
        let text = record.get(text_idx).unwrap_or_default();
        if text.trim().is_empty() {
            corpus.skipped_empty += 1;
            continue;
        }
        let source_id = match id_idx {
            Some(i) => record.get(i).unwrap_or_default().trim().to_string(),
            None => row.to_string(),
        };
        if source_id.is_empty() {
            return Err(DatasetError::MalformedRow {
                row: row + 1,
                reason: "empty id".into(),
            });
        }
        if !seen.insert(source_id.clone()) {
            return Err(DatasetError::DuplicateId(source_id));
        }
        let fields = headers
            .iter()
            .zip(record.iter())
            .enumerate()
            .filter(|(i, _)| *i != text_idx && Some(*i) != id_idx)
            .map(|(_, (h, v))| (h.clone(), v.to_string()))
            .collect();
        corpus.entries.push(CorpusEntry {
            source_id,
            text: text.to_string(),
            fields,
        });
    }
    Ok(corpus)
}

fn txt_files(dir: &Path) -> Result<Vec<PathBuf>, DatasetError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    Ok(files)
}

fn load_text_dir(dir: &Path) -> Result<Corpus, DatasetError> {
    let mut corpus = Corpus::default();
    for path in txt_files(dir)? {
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        if text.trim().is_empty() {
            corpus.skipped_empty += 1;
            continue;
        }
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        corpus.entries.push(CorpusEntry::new(id, text));
    }
    Ok(corpus)
}

/// Writes entries as a delimited file with `id` and `text` columns followed
/// by any carried-through fields.
pub fn write_corpus(path: &Path, entries: &[CorpusEntry], delimiter: u8) -> Result<(), DatasetError> {
    let extra: Vec<String> = entries
        .iter()
        .flat_map(|e| e.fields.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_path(path)
        .map_err(|e| DatasetError::Write(e.to_string()))?;
    let mut header = vec!["id".to_string(), "text".to_string()];
    header.extend(extra.iter().cloned());
    w.write_record(&header).map_err(|e| DatasetError::Write(e.to_string()))?;
    for e in entries {
        let mut row = vec![e.source_id.clone(), e.text.clone()];
        row.extend(extra.iter().map(|k| e.fields.get(k).cloned().unwrap_or_default()));
        w.write_record(&row).map_err(|e| DatasetError::Write(e.to_string()))?;
    }
    w.flush().map_err(|e| DatasetError::Write(e.to_string()))
}

/// SHA-256 of a corpus file, or of the names and contents of a directory's
/// `.txt` files in sorted order. Hex encoded.
pub fn content_hash(path: &Path) -> Result<String, DatasetError> {
    let mut hasher = Sha256::new();
    if path.is_dir() {
        for file in txt_files(path)? {
            hasher.update(file.file_name().unwrap_or_default().to_string_lossy().as_bytes());
            hasher.update([0u8]);
            hasher.update(fs::read(&file).map_err(io_err(&file))?);
            hasher.update([0u8]);
        }
    } else {
        hasher.update(fs::read(path).map_err(io_err(path))?);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Blank-line separated blocks of non-blank text, at least 1.
pub fn count_paragraphs(text: &str) -> usize {
    let mut count = 0;
    let mut in_block = false;
    for line in text.lines() {
        if line.trim().is_empty() {
            in_block = false;
        } else if !in_block {
            in_block = true;
            count += 1;
        }
    }
    count.max(1)
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MeanStd<T = f64> {
    pub mean: T,
    pub std: T,
}

impl<T: Scalar> MeanStd<T> {
    pub fn of(xs: &[T]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = T::count(xs.len());
        let mean = xs.iter().copied().sum::<T>() / n;
        let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n;
        Some(MeanStd { mean, std: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CorpusStats<T = f64> {
    pub entries: usize,
    pub words: MeanStd<T>,
    pub sentences: MeanStd<T>,
    pub paragraphs: MeanStd<T>,
}

/// Per-entry words, sentences and paragraphs summarised over the corpus.
/// `None` for an empty corpus.
pub fn corpus_stats<T: Scalar>(entries: &[CorpusEntry]) -> Option<CorpusStats<T>> {
    let per_entry: Vec<(usize, usize, usize)> = entries
        .par_iter()
        .map(|e| {
            let tokens = tokenize(&e.text);
            let sentences = segment_sentences(&e.text, &tokens).len();
            (tokens.len(), sentences, count_paragraphs(&e.text))
        })
        .collect();
    let column = |f: fn(&(usize, usize, usize)) -> usize| -> Vec<T> { per_entry.iter().map(|r| T::count(f(r))).collect() };
    Some(CorpusStats {
        entries: entries.len(),
        words: MeanStd::of(&column(|r| r.0))?,
        sentences: MeanStd::of(&column(|r| r.1))?,
        paragraphs: MeanStd::of(&column(|r| r.2))?,
    })
}

/// Scores of every entry with at least one word token, in corpus order.
pub fn corpus_fres<T: Scalar>(entries: &[CorpusEntry], syllabifier: &Syllabifier) -> Vec<(String, T)> {
    entries
        .par_iter()
        .filter_map(|e| analyze_with::<T>(&e.text, syllabifier).ok().map(|a| (e.source_id.clone(), a.fres)))
        .collect()
}

/// Fixed-width histogram; bin `k` covers `[origin + k*width, origin + (k+1)*width)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Histogram<T = f64> {
    pub origin: T,
    pub bin_width: T,
    pub counts: Vec<usize>,
}

impl<T: Scalar> Histogram<T> {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn bin_range(&self, k: usize) -> (T, T) {
        let lo = self.origin + T::count(k) * self.bin_width;
        (lo, lo + self.bin_width)
    }
}

/// Histogram of values over `[min, max]`. Without an explicit origin the
/// first bin starts at the largest multiple of `bin_width` not above the
/// minimum.
///
/// # Panics
/// If `bin_width` is not positive, or an explicit origin exceeds the minimum.
pub fn fres_histogram<T: Scalar>(values: &[T], bin_width: T, origin: Option<T>) -> Histogram<T> {
    assert!(bin_width > T::zero(), "bin width must be positive");
    let finite: Vec<T> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let Some(min) = finite.iter().copied().reduce(T::min) else {
        return Histogram {
            origin: origin.unwrap_or_else(T::zero),
            bin_width,
            counts: Vec::new(),
        };
    };
    let max = finite.iter().copied().fold(min, T::max);
    let origin = origin.unwrap_or_else(|| (min / bin_width).floor() * bin_width);
    assert!(origin <= min, "histogram origin above minimum value");
    let bin_of = |v: T| ((v - origin) / bin_width).floor().to_usize().unwrap_or(0);
    let mut counts = vec![0usize; bin_of(max) + 1];
    for v in finite {
        counts[bin_of(v)] += 1;
    }
    Histogram {
        origin,
        bin_width,
        counts,
    }
}
