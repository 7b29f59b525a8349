use std::collections::HashSet;
use std::ops::Range;
use std::sync::OnceLock;

use super::tokenize::Token;

/// Bumped whenever `data/abbreviations.txt` changes.
pub const ABBREVIATIONS_VERSION: u32 = 1;

const ABBREVIATIONS_SRC: &str = include_str!("../../data/abbreviations.txt");

fn abbreviations() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        ABBREVIATIONS_SRC
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

pub fn is_abbreviation(word: &str) -> bool {
    abbreviations().contains(word.to_lowercase().as_str())
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}' | '\u{bb}')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '\u{201c}' | '\u{2018}' | '\u{ab}')
}

/// Byte offsets at which a sentence ends.
///
/// A boundary is a run of `.`, `!` or `?` (optionally followed by closing
/// quotes or brackets) that is followed either by end of text or by
/// whitespace and then an uppercase letter (opening quotes allowed in
/// between). A single `.` directly after a listed abbreviation never ends
/// a sentence.
pub fn sentence_boundaries(text: &str) -> Vec<usize> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_terminal(chars[i].1) {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut j = i;
        while j < chars.len() && is_terminal(chars[j].1) {
            j += 1;
        }
        let only_period = j - run_start == 1 && chars[run_start].1 == '.';
        while j < chars.len() && is_closer(chars[j].1) {
            j += 1;
        }
        let end_byte = chars.get(j).map_or(text.len(), |(b, _)| *b);

        let mut k = j;
        let mut saw_space = false;
        while k < chars.len() && chars[k].1.is_whitespace() {
            saw_space = true;
            k += 1;
        }
        while k < chars.len() && is_opener(chars[k].1) {
            k += 1;
        }
        let at_end = chars[j..].iter().all(|(_, c)| c.is_whitespace());
        let followed_by_capital = saw_space && chars.get(k).is_some_and(|(_, c)| c.is_uppercase());

        if (at_end || followed_by_capital) && !(only_period && precedes_abbreviation(text, chars[run_start].0))
        {
            out.push(end_byte);
        }
        i = j.max(run_start + 1);
    }
    out
}

/// Whether the chunk of text immediately before `period_at` is a listed
/// abbreviation (`Dr`, `e.g`).
fn precedes_abbreviation(text: &str, period_at: usize) -> bool {
    let before = &text[..period_at];
    let chunk_start = before
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace() || is_opener(*c))
        .map_or(0, |(b, c)| b + c.len_utf8());
    let chunk = &before[chunk_start..];
    !chunk.is_empty() && is_abbreviation(chunk)
}

/// Groups tokens into sentences, returning token-index ranges.
///
/// Spans are contiguous, non-overlapping and cover every token. Text with
/// tokens but no boundary is a single sentence; text without tokens has no
/// sentences.
pub fn segment_sentences(text: &str, tokens: &[Token<'_>]) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    if tokens.is_empty() {
        return spans;
    }
    let mut start = 0;
    for boundary in sentence_boundaries(text) {
        let end = start + tokens[start..].iter().take_while(|t| t.start < boundary).count();
        if end > start {
            spans.push(start..end);
            start = end;
        }
    }
    if start < tokens.len() {
        spans.push(start..tokens.len());
    }
    spans
}
