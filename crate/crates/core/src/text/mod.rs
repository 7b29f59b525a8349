//! Tokenization, sentence segmentation, syllable counting and the Flesch
//! reading-ease score.

mod sentences;
mod syllables;
mod tokenize;

use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use sentences::{is_abbreviation, segment_sentences, sentence_boundaries, ABBREVIATIONS_VERSION};
pub use syllables::{count_syllables, Syllabifier};
pub use tokenize::{normalized_tokens, tokenize, Token};

use crate::error::TextError;
use crate::scalar::Scalar;

/// Flesch reading-ease from raw counts:
/// `206.835 - 1.015 * words/sentences - 84.6 * syllables/words`.
pub fn fres_from_counts<T: Scalar>(words: usize, sentences: usize, syllables: usize) -> T {
    let w = T::count(words);
    T::lit(206.835) - T::lit(1.015) * (w / T::count(sentences)) - T::lit(84.6) * (T::count(syllables) / w)
}

/// Token, sentence and syllable decomposition of one passage with its score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TextAnalysis<T = f64> {
    pub text: String,
    pub tokens: Vec<String>,
    pub sentence_spans: Vec<Range<usize>>,
    pub syllable_counts: Vec<u32>,
    pub n_words: usize,
    pub n_sentences: usize,
    pub n_syllables: usize,
    pub fres: T,
}

impl<T: Scalar> TextAnalysis<T> {
    /// Recomputes the score from the stored counts.
    pub fn recompute_fres(&self) -> T {
        fres_from_counts(self.n_words, self.n_sentences, self.n_syllables)
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[String]> + '_ {
        self.sentence_spans.iter().map(|r| &self.tokens[r.clone()])
    }
}

/// Analyses text with the rule-based syllabifier.
pub fn analyze<T: Scalar>(text: &str) -> Result<TextAnalysis<T>, TextError> {
    analyze_with(text, &Syllabifier::default())
}

/// Analyses text using the given syllabifier.
pub fn analyze_with<T: Scalar>(text: &str, syllabifier: &Syllabifier) -> Result<TextAnalysis<T>, TextError> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(TextError::EmptyText);
    }
    let sentence_spans = segment_sentences(text, &tokens);
    let syllable_counts: Vec<u32> = tokens.iter().map(|t| syllabifier.count(t.text)).collect();
    let n_words = tokens.len();
    let n_sentences = sentence_spans.len();
    let n_syllables = syllable_counts.iter().map(|&c| c as usize).sum();
    Ok(TextAnalysis {
        text: text.to_string(),
        tokens: tokens.iter().map(|t| t.text.to_string()).collect(),
        sentence_spans,
        syllable_counts,
        n_words,
        n_sentences,
        n_syllables,
        fres: fres_from_counts(n_words, n_sentences, n_syllables),
    })
}

/// Flesch reading-ease of a passage.
pub fn fres<T: Scalar>(text: &str) -> Result<T, TextError> {
    analyze::<T>(text).map(|a| a.fres)
}
