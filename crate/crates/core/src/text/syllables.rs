//! Rule-based English syllable counting with an optional lexicon override.
//!
//! The rules follow the vowel-group heuristic common to readability tools,
//! applied to the lowercased token with digits removed:
//!
//! 1. a word of at most three characters has one syllable;
//! 2. a final `e` or `es` is dropped together with the character before it,
//!    unless that character is `l` or a vowel (`make`, `boxes` drop it;
//!    `table`, `tables`, `free` keep it);
//! 3. a leading `y` is dropped;
//! 4. each run of vowels (`a e i o u y`, accented Latin vowels included)
//!    contributes one syllable per started pair of letters, so `ea` is one
//!    syllable and `eau` is two;
//! 5. the letter part counts at least one syllable.
//!
//! Digits count one syllable each. Hyphens and apostrophes stay in the word,
//! which means a hyphenated compound is measured as a single word.

use std::collections::HashMap;
use std::path::Path;

use crate::error::LexiconError;

fn is_vowel(c: char) -> bool {
    matches!(
        c,
        'a' | 'e' | 'i' | 'o' | 'u' | 'y'
            | 'à' | 'á' | 'â' | 'ä' | 'ã' | 'å' | 'æ' | 'è' | 'é' | 'ê' | 'ë'
            | 'ì' | 'í' | 'î' | 'ï' | 'ò' | 'ó' | 'ô' | 'ö' | 'õ' | 'ø' | 'œ'
            | 'ù' | 'ú' | 'û' | 'ü' | 'ý' | 'ÿ'
    )
}

fn keeps_final_e(c: char) -> bool {
    c == 'l' || is_vowel(c)
}

/// Syllables of a lowercased word with digits already removed.
fn word_syllables(word: &[char]) -> u32 {
    if !word.iter().any(|c| c.is_alphabetic()) {
        return 0;
    }
    let n = word.len();
    if n <= 3 {
        return 1;
    }
    let mut end = n;
    if word[n - 1] == 's' && word[n - 2] == 'e' && !keeps_final_e(word[n - 3]) {
        end = n - 3;
    } else if word[n - 1] == 'e' && !keeps_final_e(word[n - 2]) {
        end = n - 2;
    }
    let start = usize::from(word[0] == 'y');
    let mut groups = 0u32;
    let mut i = start;
    while i < end {
        if is_vowel(word[i]) {
            groups += 1;
            i += if i + 1 < end && is_vowel(word[i + 1]) { 2 } else { 1 };
        } else {
            i += 1;
        }
    }
    groups.max(1)
}

/// Rule-based syllable count for one word token. Always at least 1.
pub fn count_syllables(token: &str) -> u32 {
    let mut digits = 0u32;
    let word: Vec<char> = token
        .to_lowercase()
        .chars()
        .filter(|c| {
            let d = c.is_numeric();
            digits += u32::from(d);
            !d
        })
        .collect();
    (digits + word_syllables(&word)).max(1)
}

/// Syllable counter with an optional pronunciation lexicon that overrides
/// the rules for listed words.
#[derive(Debug, Clone, Default)]
pub struct Syllabifier {
    lexicon: HashMap<String, u32>,
}

impl Syllabifier {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `word<TAB>count` lines. Blank lines and `#` comments are skipped.
    pub fn from_lexicon_str(src: &str) -> Result<Self, LexiconError> {
        let mut lexicon = HashMap::new();
        for (idx, line) in src.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, count) = line.split_once('\t').ok_or_else(|| LexiconError::Malformed {
                line: idx + 1,
                reason: "expected word<TAB>syllable_count".into(),
            })?;
            let count: u32 = count.trim().parse().map_err(|_| LexiconError::Malformed {
                line: idx + 1,
                reason: format!("invalid syllable count {count:?}"),
            })?;
            if count == 0 {
                return Err(LexiconError::Malformed {
                    line: idx + 1,
                    reason: "syllable count must be positive".into(),
                });
            }
            lexicon.insert(word.trim().to_lowercase(), count);
        }
        Ok(Self { lexicon })
    }

    pub fn from_lexicon_file(path: &Path) -> Result<Self, LexiconError> {
        let src = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_lexicon_str(&src)
    }

    pub fn lexicon_len(&self) -> usize {
        self.lexicon.len()
    }

    pub fn count(&self, token: &str) -> u32 {
        if !self.lexicon.is_empty() {
            if let Some(&n) = self.lexicon.get(&token.to_lowercase()) {
                return n;
            }
        }
        count_syllables(token)
    }
}
