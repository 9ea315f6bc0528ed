//! Sentence segmentation and tokenization.

use serde::{Deserialize, Serialize};

/// A surface token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// False for punctuation, symbols and bare numbers.
    pub is_word: bool,
    /// Alphabetic characters in `surface`; digits and hyphens do not count.
    pub char_length: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        debug_assert!(!surface.is_empty());
        let char_length = surface.chars().filter(|c| c.is_alphabetic()).count();
        Self {
            is_word: char_length > 0,
            char_length,
            surface,
        }
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

/// Splits abbreviation-normalized text into sentences.
///
/// A boundary falls after a run of `.`, `!` or `?` (plus any closing quotes
/// or brackets) that is followed by whitespace and an uppercase letter, or by
/// the end of the text. A period between two digits never ends a sentence.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        if c == '.'
            && i > 0
            && chars[i - 1].1.is_ascii_digit()
            && chars.get(i + 1).is_some_and(|(_, n)| n.is_ascii_digit())
        {
            i += 1;
            continue;
        }
        let mut end = i + 1;
        while end < chars.len() && (is_terminator(chars[end].1) || is_closer(chars[end].1)) {
            end += 1;
        }
        let mut next = end;
        while next < chars.len() && chars[next].1.is_whitespace() {
            next += 1;
        }
        let boundary = next == chars.len() || (next > end && chars[next].1.is_uppercase());
        if boundary {
            let byte_end = chars.get(end).map_or(text.len(), |(b, _)| *b);
            push_trimmed(&mut sentences, &text[start..byte_end]);
            start = chars.get(next).map_or(text.len(), |(b, _)| *b);
            i = next;
        } else {
            i = end;
        }
    }
    push_trimmed(&mut sentences, &text[start..]);
    sentences
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_owned());
    }
}

/// Splits a sentence into tokens: whitespace first, then every symbol
/// becomes its own token. Hyphens and apostrophes between alphanumerics and
/// periods or commas between digits stay inside the token.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for chunk in sentence.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let prev = i.checked_sub(1).map(|j| chars[j]);
            let next = chars.get(i + 1).copied();
            let joins = match c {
                '-' | '\'' | '\u{2019}' | '.' => {
                    prev.is_some_and(char::is_alphanumeric) && next.is_some_and(char::is_alphanumeric)
                }
                ',' => {
                    prev.is_some_and(|p| p.is_ascii_digit()) && next.is_some_and(|n| n.is_ascii_digit())
                }
                _ => c.is_alphanumeric(),
            };
            if joins {
                word.push(c);
            } else {
                if !word.is_empty() {
                    tokens.push(Token::new(std::mem::take(&mut word)));
                }
                tokens.push(Token::new(c.to_string()));
            }
        }
        if !word.is_empty() {
            tokens.push(Token::new(word));
        }
    }
    tokens
}
