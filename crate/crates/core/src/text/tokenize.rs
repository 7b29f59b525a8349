use std::ops::Range;

/// A word token borrowed from the analysed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    /// Byte offsets into the source text.
    pub start: usize,
    pub end: usize,
}

impl Token<'_> {
    pub fn span(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn is_numeric(&self) -> bool {
        self.text.chars().any(|c| c.is_numeric())
    }
}

pub(crate) fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02bc}')
}

pub(crate) fn is_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}')
}

/// Splits text into word tokens.
///
/// A token is a maximal run of letters and digits, where apostrophes and
/// hyphens are kept only when they sit between two alphanumeric characters
/// (`don't`, `snow-white`). Everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].1.is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = chars[i].0;
        let mut j = i + 1;
        while j < chars.len() {
            let c = chars[j].1;
            if c.is_alphanumeric() {
                j += 1;
            } else if (is_apostrophe(c) || is_hyphen(c))
                && chars.get(j + 1).is_some_and(|(_, n)| n.is_alphanumeric())
            {
                j += 2;
            } else {
                break;
            }
        }
        let end = chars.get(j).map_or(text.len(), |(b, _)| *b);
        tokens.push(Token {
            text: &text[start..end],
            start,
            end,
        });
        i = j;
    }
    tokens
}

/// Lowercased token strings, the normalisation used for word error rate.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    tokenize(text).iter().map(|t| t.text.to_lowercase()).collect()
}
