//! Cheap coherence checks on generated text.

use serde::{Deserialize, Serialize};

use readctl_core::text::tokenize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GarbageThresholds {
    /// Largest tolerated share of vowel-less word tokens of length >= `min_vowelless_len`.
    pub max_vowelless_fraction: f64,
    pub min_vowelless_len: usize,
    /// Shortest run of one repeated token that counts as garbage.
    pub max_repeat_run: usize,
    /// Largest tolerated share of non-alphabetic, non-whitespace characters.
    pub max_non_alpha_fraction: f64,
    /// Outputs with fewer word tokens than this are garbage when the source
    /// has at least `long_source_words`.
    pub min_output_words: usize,
    pub long_source_words: usize,
}

impl Default for GarbageThresholds {
    fn default() -> Self {
        GarbageThresholds {
            max_vowelless_fraction: 0.2,
            min_vowelless_len: 4,
            max_repeat_run: 5,
            max_non_alpha_fraction: 0.4,
            min_output_words: 3,
            long_source_words: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum GarbageReason {
    Empty,
    VowellessTokens { fraction: f64 },
    RepeatedToken { token: String, run: usize },
    NonAlphabetic { fraction: f64 },
    TooShort { words: usize, source_words: usize },
}

impl std::fmt::Display for GarbageReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GarbageReason::Empty => write!(f, "output has no word tokens"),
            GarbageReason::VowellessTokens { fraction } => {
                write!(f, "{:.0}% of tokens have no vowel", 100.0 * fraction)
            }
            GarbageReason::RepeatedToken { token, run } => write!(f, "token {token:?} repeated {run} times"),
            GarbageReason::NonAlphabetic { fraction } => {
                write!(f, "{:.0}% of characters are not letters", 100.0 * fraction)
            }
            GarbageReason::TooShort { words, source_words } => {
                write!(f, "{words} word(s) for a {source_words}-word source")
            }
        }
    }
}

fn has_vowel(token: &str) -> bool {
    token
        .chars()
        .any(|c| matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y') || (c.is_alphabetic() && !c.is_ascii()))
}

/// The first rule `text` violates, if any.
pub fn garbage_reason(text: &str, source_text: &str, t: &GarbageThresholds) -> Option<GarbageReason> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Some(GarbageReason::Empty);
    }

    let wordlike: Vec<&str> = tokens.iter().filter(|t| !t.is_numeric()).map(|t| t.text).collect();
    if !wordlike.is_empty() {
        let vowelless = wordlike
            .iter()
            .filter(|w| w.chars().count() >= t.min_vowelless_len && !has_vowel(w))
            .count();
        let fraction = vowelless as f64 / wordlike.len() as f64;
        if fraction > t.max_vowelless_fraction {
            return Some(GarbageReason::VowellessTokens { fraction });
        }
    }

    let mut run = 1;
    for pair in tokens.windows(2) {
        if pair[0].text.to_lowercase() == pair[1].text.to_lowercase() {
            run += 1;
            if run >= t.max_repeat_run {
                return Some(GarbageReason::RepeatedToken {
                    token: pair[1].text.to_lowercase(),
                    run,
                });
            }
        } else {
            run = 1;
        }
    }

    let (mut visible, mut non_alpha) = (0usize, 0usize);
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        visible += 1;
        non_alpha += usize::from(!c.is_alphabetic());
    }
    let fraction = non_alpha as f64 / visible as f64;
    if fraction > t.max_non_alpha_fraction {
        return Some(GarbageReason::NonAlphabetic { fraction });
    }

    let source_words = tokenize(source_text).len();
    if tokens.len() < t.min_output_words && source_words >= t.long_source_words {
        return Some(GarbageReason::TooShort {
            words: tokens.len(),
            source_words,
        });
    }
    None
}

pub fn detect_garbage(text: &str, source_text: &str, thresholds: &GarbageThresholds) -> bool {
    garbage_reason(text, source_text, thresholds).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROSE: &str = "The girls were gathered at one end of the room and the boys at the other. \
        Each player was given a small flag which they were to plant on reaching the Pole.";

    fn check(text: &str) -> Option<GarbageReason> {
        garbage_reason(text, PROSE, &GarbageThresholds::default())
    }

    #[test]
    fn ordinary_prose_passes() {
        assert_eq!(check(PROSE), None);
        assert_eq!(check("In 1948, 12 rhythms were heard by 300 people."), None);
    }

    #[test]
    fn vowel_free_tokens_trip() {
        assert!(matches!(check("xq zvrk qwpt xq zvrk qwpt"), Some(GarbageReason::VowellessTokens { .. })));
    }

    #[test]
    fn repeats_trip() {
        assert!(matches!(
            check("and the the the the the end"),
            Some(GarbageReason::RepeatedToken { run: 5, .. })
        ));
        assert_eq!(check("the the the the end"), None);
    }

    #[test]
    fn symbol_soup_trips() {
        assert!(matches!(check("{} [] <> ## $$ ok %%"), Some(GarbageReason::NonAlphabetic { .. })));
    }

    #[test]
    fn short_answer_to_a_long_source_trips() {
        let long = "word ".repeat(180);
        let t = GarbageThresholds::default();
        assert!(matches!(garbage_reason("ok", &long, &t), Some(GarbageReason::TooShort { words: 1, .. })));
        assert_eq!(garbage_reason("ok", "Short source.", &t), None);
        assert_eq!(garbage_reason("  ", &long, &t), Some(GarbageReason::Empty));
    }

    #[test]
    fn thresholds_are_configurable() {
        let lenient = GarbageThresholds {
            max_vowelless_fraction: 1.0,
            ..GarbageThresholds::default()
        };
        assert!(!detect_garbage("xq zvrk qwpt", PROSE, &lenient));
    }
}
