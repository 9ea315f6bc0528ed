//! Part-of-speech tagging: the tagger contract, the built-in lexicon tagger
//! and the fine-to-coarse tag mapping.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::segment::Token;
use super::PipelineError;

/// Coarse lexical class of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LexClass {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Other,
}

impl LexClass {
    pub const LEXICAL: [LexClass; 4] = [
        LexClass::Noun,
        LexClass::Verb,
        LexClass::Adjective,
        LexClass::Adverb,
    ];
}

/// Maps a Penn Treebank tag onto its coarse class. Unknown tags are `Other`.
pub fn coarsen_tag(fine_tag: &str) -> LexClass {
    match fine_tag {
        "NN" | "NNS" | "NNP" | "NNPS" => LexClass::Noun,
        "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" => LexClass::Verb,
        "JJ" | "JJR" | "JJS" => LexClass::Adjective,
        "RB" | "RBR" | "RBS" => LexClass::Adverb,
        _ => LexClass::Other,
    }
}

/// A token with its fine tag and coarse class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: Token,
    pub fine_tag: String,
    pub lex_class: LexClass,
}

impl TaggedToken {
    /// Non-word tokens are always `Other`, whatever tag they carry.
    pub fn new(token: Token, fine_tag: impl Into<String>) -> Self {
        let fine_tag = fine_tag.into();
        let lex_class = if token.is_word {
            coarsen_tag(&fine_tag)
        } else {
            LexClass::Other
        };
        Self {
            token,
            fine_tag,
            lex_class,
        }
    }
}

/// Anything that assigns one fine tag per token of a sentence.
///
/// Implementations are shared across worker threads.
pub trait Tagger: Send + Sync {
    fn tag(&self, tokens: &[Token]) -> Vec<String>;
}

/// Zips tokens with the tagger's output.
pub fn tag_tokens(tokens: Vec<Token>, tagger: &dyn Tagger) -> Result<Vec<TaggedToken>, PipelineError> {
    if tokens.is_empty() {
        return Ok(Vec::new());
    }
    let tags = tagger.tag(&tokens);
    if tags.len() != tokens.len() {
        return Err(PipelineError::TaggerLengthMismatch {
            expected: tokens.len(),
            got: tags.len(),
        });
    }
    Ok(tokens
        .into_iter()
        .zip(tags)
        .map(|(token, tag)| TaggedToken::new(token, tag))
        .collect())
}

const BUILTIN_LEXICON: &str = include_str!("../../data/lexicon.tsv");

/// Closed-lexicon tagger with suffix fallbacks and a few bigram rules.
const AUXILIARIES: [&str; 11] = ["be", "is", "are", "was", "were", "been", "being", "has", "have", "had", "having"];

#[derive(Debug, Clone)]
pub struct LexiconTagger {
    // Tags per lowercased word, most frequent first.
    entries: HashMap<String, Vec<String>>,
}

impl LexiconTagger {
    pub fn builtin() -> Self {
        Self::from_tsv(BUILTIN_LEXICON).expect("bundled lexicon parses")
    }

    /// Reads `word TAB tag TAB frequency` lines. Ties in frequency go to the
    /// lexically smaller tag.
    pub fn from_tsv(text: &str) -> Result<Self, PipelineError> {
        let mut counts: HashMap<String, Vec<(String, u64)>> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| PipelineError::Format {
                line: i + 1,
                message: message.to_owned(),
            };
            let mut cols = line.split('\t');
            let (Some(word), Some(tag), Some(freq), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(err("expected word<TAB>tag<TAB>frequency"));
            };
            let freq: u64 = freq.trim().parse().map_err(|_| err("bad frequency"))?;
            if word.is_empty() || tag.is_empty() {
                return Err(err("empty word or tag"));
            }
            let slot = counts.entry(word.to_lowercase()).or_default();
            match slot.iter_mut().find(|(t, _)| t == tag) {
                Some((_, f)) => *f += freq,
                None => slot.push((tag.to_owned(), freq)),
            }
        }
        let entries = counts
            .into_iter()
            .map(|(word, mut tags)| {
                tags.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                (word, tags.into_iter().map(|(t, _)| t).collect())
            })
            .collect();
        Ok(Self { entries })
    }

    fn lookup(&self, word: &str) -> Option<&[String]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    fn has_tag(&self, word: &str, pred: impl Fn(&str) -> bool) -> Option<&str> {
        self.lookup(word)?.iter().map(String::as_str).find(|t| pred(t))
    }

    fn is_known_noun(&self, word: &str) -> bool {
        self.has_tag(word, |t| t == "NN").is_some()
    }

    fn is_known_verb(&self, word: &str) -> bool {
        self.has_tag(word, |t| t == "VB" || t == "VBP").is_some()
    }

    fn symbol_tag(surface: &str) -> &'static str {
        if surface.chars().any(|c| c.is_ascii_digit()) {
            return "CD";
        }
        match surface {
            "." | "!" | "?" => ".",
            "," => ",",
            ":" | ";" | "-" | "\u{2013}" | "\u{2014}" | "\u{2026}" => ":",
            "(" | "[" | "{" => "-LRB-",
            ")" | "]" | "}" => "-RRB-",
            "\"" | "\u{201c}" | "`" => "``",
            "\u{201d}" | "'" | "\u{2019}" => "''",
            "$" | "#" => "$",
            _ => "SYM",
        }
    }

    fn suffix_tag(&self, surface: &str, mid_sentence: bool) -> &'static str {
        let first = surface.chars().next().unwrap_or(' ');
        if mid_sentence && first.is_uppercase() {
            return "NNP";
        }
        let lower = surface.to_lowercase();
        // Suffixes of hyphenated compounds are read off the last segment.
        let last = lower.rsplit('-').next().unwrap_or(&lower);
        if last.len() > 3 && last.ends_with("ly") {
            return "RB";
        }
        if last.len() > 4 && last.ends_with("ing") {
            return "VBG";
        }
        if last.len() > 3 && last.ends_with("ed") {
            return "VBD";
        }
        if last.len() > 2 && last.ends_with('s') && !last.ends_with("ss") {
            let stem = &last[..last.len() - 1];
            if self.is_known_noun(stem) {
                return "NNS";
            }
            if self.is_known_verb(stem) {
                return "VBZ";
            }
            if let Some(stem) = last.strip_suffix("es") {
                if self.is_known_noun(stem) {
                    return "NNS";
                }
            }
        }
        const NOUN_SUFFIXES: [&str; 7] = ["tion", "sion", "ment", "ness", "ity", "ism", "ance"];
        const ADJ_SUFFIXES: [&str; 9] = ["ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ary"];
        if last.len() > 5 && NOUN_SUFFIXES.iter().any(|s| last.ends_with(s)) {
            return "NN";
        }
        if last.len() > 4 && ADJ_SUFFIXES.iter().any(|s| last.ends_with(s)) {
            return "JJ";
        }
        // "-ise" needs a longer stem than "-ize" so that "noise" or "raise" stay nouns.
        if (last.len() > 4 && last.ends_with("ize")) || (last.len() > 6 && last.ends_with("ise")) {
            return "VB";
        }
        if last.len() > 3
            && last.ends_with('s')
            && !["ss", "us", "is"].iter().any(|s| last.ends_with(s))
        {
            return "NNS";
        }
        "NN"
    }
}

impl Tagger for LexiconTagger {
    fn tag(&self, tokens: &[Token]) -> Vec<String> {
        let mut tags: Vec<String> = Vec::with_capacity(tokens.len());
        let mut seen_word = false;
        // Set after a form of "be" or "have" and kept across adverbs, so the
        // next past form is read as a participle.
        let mut after_auxiliary = false;
        for token in tokens {
            let surface = token.surface.as_str();
            let prev = tags.last().map(String::as_str);
            let tag: String = if !token.is_word {
                Self::symbol_tag(surface).to_owned()
            } else {
                let known = self.lookup(surface);
                // Known words keep their lexicon tag even when capitalized.
                let mut tag = match known {
                    Some(tags) => tags[0].clone(),
                    None => self.suffix_tag(surface, seen_word).to_owned(),
                };
                match prev {
                    Some("MD") | Some("TO") => {
                        let base_form = known.is_some_and(|t| t.iter().any(|t| t == "VB"))
                            || tag == "VBP"
                            || (known.is_none() && tag == "NN");
                        if base_form {
                            tag = "VB".into();
                        }
                    }
                    Some("DT") | Some("PRP$") | Some("JJ") => {
                        if tag == "VBD" {
                            tag = "VBN".into();
                        } else if coarsen_tag(&tag) == LexClass::Verb && tag != "VBN" && tag != "VBG" {
                            match known.and_then(|t| t.iter().find(|t| t.starts_with("NN"))) {
                                Some(noun) => tag = noun.clone(),
                                None if known.is_none() => tag = "NN".into(),
                                None => {}
                            }
                        }
                    }
                    Some("PRP") | Some("NNS") | Some("NNP") if tag.starts_with("NN") || tag == "VB" => {
                        if let Some(verb) =
                            known.and_then(|t| t.iter().find(|t| matches!(t.as_str(), "VBP" | "VBZ" | "VBD")))
                        {
                            tag = verb.clone();
                        }
                    }
                    _ => {}
                }
                if after_auxiliary && tag == "VBD" {
                    let participle = known.is_none() || known.is_some_and(|t| t.iter().any(|t| t == "VBN"));
                    if participle {
                        tag = "VBN".into();
                    }
                }
                tag
            };
            if token.is_word {
                seen_word = true;
                let lower = surface.to_lowercase();
                if AUXILIARIES.contains(&lower.as_str()) {
                    after_auxiliary = true;
                } else if !tag.starts_with("RB") {
                    after_auxiliary = false;
                }
            }
            tags.push(tag);
        }
        tags
    }
}
