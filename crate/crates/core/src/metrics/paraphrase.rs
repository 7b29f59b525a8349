use serde::{Deserialize, Serialize};

use crate::error::MetricError;
use crate::scalar::Scalar;
use crate::text::TextAnalysis;

/// Paraphrase-quality scores for one (source, generated) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PairMetrics<T = f64> {
    pub self_wer: T,
    pub sem_precision: Option<T>,
    pub sem_recall: Option<T>,
    pub sem_f1: Option<T>,
    pub length_change_pct: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EditCounts {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub reference_len: usize,
}

impl EditCounts {
    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

#[derive(Clone, Copy)]
enum Step {
    Diag,
    Del,
    Ins,
}

/// Minimal unit-cost word alignment of `hypothesis` against `reference`.
///
/// Ties prefer a diagonal move (match or substitution), then deletion,
/// then insertion. Every minimal alignment has the same total.
pub fn align_words<A: PartialEq<B>, B>(reference: &[A], hypothesis: &[B]) -> EditCounts {
    let (n, m) = (reference.len(), hypothesis.len());
    let width = m + 1;
    let mut cost = vec![0usize; (n + 1) * width];
    let mut step = vec![Step::Diag; (n + 1) * width];
    for i in 1..=n {
        cost[i * width] = i;
        step[i * width] = Step::Del;
    }
    for j in 1..=m {
        cost[j] = j;
        step[j] = Step::Ins;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = usize::from(reference[i - 1] != hypothesis[j - 1]);
            let diag = cost[(i - 1) * width + j - 1] + sub;
            let del = cost[(i - 1) * width + j] + 1;
            let ins = cost[i * width + j - 1] + 1;
            let (c, s) = if diag <= del && diag <= ins {
                (diag, Step::Diag)
            } else if del <= ins {
                (del, Step::Del)
            } else {
                (ins, Step::Ins)
            };
            cost[i * width + j] = c;
            step[i * width + j] = s;
        }
    }

    let mut counts = EditCounts {
        reference_len: n,
        ..EditCounts::default()
    };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match step[i * width + j] {
            Step::Diag => {
                if reference[i - 1] != hypothesis[j - 1] {
                    counts.substitutions += 1;
                }
                i -= 1;
                j -= 1;
            }
            Step::Del => {
                counts.deletions += 1;
                i -= 1;
            }
            Step::Ins => {
                counts.insertions += 1;
                j -= 1;
            }
        }
    }
    counts
}

/// Word error rate of the generated tokens with the source as reference.
/// May exceed 1.
pub fn self_wer<T: Scalar, S: AsRef<str>>(source_tokens: &[S], generated_tokens: &[S]) -> Result<T, MetricError> {
    if source_tokens.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let src: Vec<&str> = source_tokens.iter().map(AsRef::as_ref).collect();
    let gen: Vec<&str> = generated_tokens.iter().map(AsRef::as_ref).collect();
    let counts = align_words(&src, &gen);
    Ok(T::count(counts.errors()) / T::count(counts.reference_len))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SemanticScore<T = f64> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

fn unit<T: Scalar>(v: &[T]) -> Vec<T> {
    let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm > T::zero() {
        v.iter().map(|&x| x / norm).collect()
    } else {
        vec![T::zero(); v.len()]
    }
}

/// Greedy max-cosine token matching between two embedded texts.
///
/// Precision averages, over generated tokens, the best cosine to any source
/// token; recall does the same from the source side. F1 is their harmonic
/// mean when both are positive and 0 otherwise. No IDF weighting and no
/// baseline rescaling. Zero vectors have cosine 0 with everything.
pub fn semantic_score<T: Scalar, V: AsRef<[T]>>(
    source: &[V],
    generated: &[V],
) -> Result<SemanticScore<T>, MetricError> {
    let first = source.first().ok_or(MetricError::EmptySide("source"))?;
    if generated.is_empty() {
        return Err(MetricError::EmptySide("generated"));
    }
    let dim = first.as_ref().len();
    for v in source.iter().chain(generated) {
        if v.as_ref().len() != dim {
            return Err(MetricError::DimensionMismatch {
                expected: dim,
                found: v.as_ref().len(),
            });
        }
    }
    let src: Vec<Vec<T>> = source.iter().map(|v| unit(v.as_ref())).collect();
    let gen: Vec<Vec<T>> = generated.iter().map(|v| unit(v.as_ref())).collect();

    let mut best_for_gen = vec![T::neg_infinity(); gen.len()];
    let mut best_for_src = vec![T::neg_infinity(); src.len()];
    for (i, s) in src.iter().enumerate() {
        for (j, g) in gen.iter().enumerate() {
            let sim: T = s.iter().zip(g).map(|(&a, &b)| a * b).sum();
            best_for_gen[j] = best_for_gen[j].max(sim);
            best_for_src[i] = best_for_src[i].max(sim);
        }
    }
    let precision = best_for_gen.iter().copied().sum::<T>() / T::count(gen.len());
    let recall = best_for_src.iter().copied().sum::<T>() / T::count(src.len());
    let f1 = if precision > T::zero() && recall > T::zero() {
        T::lit(2.0) * precision * recall / (precision + recall)
    } else {
        T::zero()
    };
    Ok(SemanticScore { precision, recall, f1 })
}

/// Percentage change in word count from `source_words` to `generated_words`.
pub fn length_change_pct<T: Scalar>(source_words: usize, generated_words: usize) -> T {
    T::lit(100.0) * (T::count(generated_words) - T::count(source_words)) / T::count(source_words)
}

pub fn length_change<T: Scalar>(source: &TextAnalysis<T>, generated: &TextAnalysis<T>) -> T {
    length_change_pct(source.n_words, generated.n_words)
}
