//! The twelve per-article complexity variables.
//!
//! | field | variable |
//! |---|---|
//! | x1 | mean sentence length (words) |
//! | x2 | sample standard deviation of sentence length |
//! | x3 | clauses per sentence |
//! | x4 | type/token ratio |
//! | x5..x8 | mean alphabetic length of nouns, verbs, adjectives, adverbs |
//! | x9..x12 | share of words that are nouns, verbs, adjectives, adverbs |
//!
//! Sentences without words are ignored throughout.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::{LexClass, TaggedDocument, TaggedSentence};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("document {0:?} has no words")]
    EmptyDocument(String),
}

pub const VARIABLE_COUNT: usize = 12;

/// Short column names, in profile order.
pub const VARIABLE_NAMES: [&str; VARIABLE_COUNT] = [
    "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11", "x12",
];

/// Descriptive names, in profile order.
pub const VARIABLE_LABELS: [&str; VARIABLE_COUNT] = [
    "mean_sentence_length",
    "sd_sentence_length",
    "clause_ratio",
    "type_token_ratio",
    "noun_length",
    "verb_length",
    "adjective_length",
    "adverb_length",
    "noun_ratio",
    "verb_ratio",
    "adjective_ratio",
    "adverb_ratio",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    pub doc_id: String,
    pub mean_sentence_length: f64,
    pub sd_sentence_length: f64,
    pub clause_ratio: f64,
    pub ttr: f64,
    /// `None` when the document has no tokens of the class.
    pub noun_length: Option<f64>,
    pub verb_length: Option<f64>,
    pub adj_length: Option<f64>,
    pub adv_length: Option<f64>,
    pub noun_ratio: f64,
    pub verb_ratio: f64,
    pub adj_ratio: f64,
    pub adv_ratio: f64,
    /// Set when only one sentence was available, so `sd_sentence_length` is 0
    /// by convention rather than by measurement.
    #[serde(default)]
    pub single_sentence: bool,
}

impl ComplexityProfile {
    /// The twelve values in x1..x12 order.
    pub fn values(&self) -> [Option<f64>; VARIABLE_COUNT] {
        [
            Some(self.mean_sentence_length),
            Some(self.sd_sentence_length),
            Some(self.clause_ratio),
            Some(self.ttr),
            self.noun_length,
            self.verb_length,
            self.adj_length,
            self.adv_length,
            Some(self.noun_ratio),
            Some(self.verb_ratio),
            Some(self.adj_ratio),
            Some(self.adv_ratio),
        ]
    }

    /// All twelve values, or `None` if any sophistication value is absent.
    pub fn complete(&self) -> Option<[f64; VARIABLE_COUNT]> {
        let v = self.values();
        let mut out = [0.0; VARIABLE_COUNT];
        for (o, x) in out.iter_mut().zip(v) {
            *o = x?;
        }
        Some(out)
    }

    /// Inverse of [`values`](Self::values). Entries other than x5..x8 must be
    /// present.
    pub fn from_values(doc_id: impl Into<String>, v: [Option<f64>; VARIABLE_COUNT]) -> Option<Self> {
        Some(Self {
            doc_id: doc_id.into(),
            mean_sentence_length: v[0]?,
            sd_sentence_length: v[1]?,
            clause_ratio: v[2]?,
            ttr: v[3]?,
            noun_length: v[4],
            verb_length: v[5],
            adj_length: v[6],
            adv_length: v[7],
            noun_ratio: v[8]?,
            verb_ratio: v[9]?,
            adj_ratio: v[10]?,
            adv_ratio: v[11]?,
            single_sentence: false,
        })
    }
}

fn retained(doc: &TaggedDocument) -> Result<Vec<&TaggedSentence>, MetricsError> {
    let kept: Vec<_> = doc.sentences.iter().filter(|s| s.word_count > 0).collect();
    if kept.is_empty() {
        return Err(MetricsError::EmptyDocument(doc.doc_id.clone()));
    }
    Ok(kept)
}

/// Mean and sample (n-1) standard deviation of words per sentence; the
/// standard deviation of a single sentence is 0.
pub fn sentence_length_stats(doc: &TaggedDocument) -> Result<(f64, f64), MetricsError> {
    let lengths: Vec<f64> = retained(doc)?.iter().map(|s| s.word_count as f64).collect();
    let n = lengths.len() as f64;
    let mean = lengths.iter().sum::<f64>() / n;
    if lengths.len() == 1 {
        return Ok((mean, 0.0));
    }
    let ss: f64 = lengths.iter().map(|x| (x - mean).powi(2)).sum();
    Ok((mean, (ss / (n - 1.0)).sqrt()))
}

pub fn clause_ratio(doc: &TaggedDocument) -> Result<f64, MetricsError> {
    let kept = retained(doc)?;
    let clauses: usize = kept.iter().map(|s| s.clause_count).sum();
    Ok(clauses as f64 / kept.len() as f64)
}

/// Distinct lowercased word surfaces over word tokens.
pub fn type_token_ratio(doc: &TaggedDocument) -> Result<f64, MetricsError> {
    let mut types = HashSet::new();
    let mut tokens = 0usize;
    for word in doc.sentences.iter().flat_map(TaggedSentence::words) {
        types.insert(word.token.surface.to_lowercase());
        tokens += 1;
    }
    if tokens == 0 {
        return Err(MetricsError::EmptyDocument(doc.doc_id.clone()));
    }
    Ok(types.len() as f64 / tokens as f64)
}

/// Mean alphabetic length of the words of one class, `None` when the class
/// does not occur.
pub fn lexical_sophistication(doc: &TaggedDocument, class: LexClass) -> Option<f64> {
    let (sum, n) = doc
        .sentences
        .iter()
        .flat_map(TaggedSentence::words)
        .filter(|w| w.lex_class == class)
        .fold((0usize, 0usize), |(sum, n), w| (sum + w.token.char_length, n + 1));
    (n > 0).then(|| sum as f64 / n as f64)
}

/// Share of word tokens that belong to `class`.
pub fn lexical_density(doc: &TaggedDocument, class: LexClass) -> Result<f64, MetricsError> {
    let (hits, total) = doc
        .sentences
        .iter()
        .flat_map(TaggedSentence::words)
        .fold((0usize, 0usize), |(h, t), w| (h + usize::from(w.lex_class == class), t + 1));
    if total == 0 {
        return Err(MetricsError::EmptyDocument(doc.doc_id.clone()));
    }
    Ok(hits as f64 / total as f64)
}

pub fn complexity_profile(doc: &TaggedDocument) -> Result<ComplexityProfile, MetricsError> {
    let (mean, sd) = sentence_length_stats(doc)?;
    let single_sentence = retained(doc)?.len() == 1;
    if single_sentence {
        log::debug!("{}: single sentence, sd_sentence_length set to 0", doc.doc_id);
    }
    Ok(ComplexityProfile {
        doc_id: doc.doc_id.clone(),
        mean_sentence_length: mean,
        sd_sentence_length: sd,
        clause_ratio: clause_ratio(doc)?,
        ttr: type_token_ratio(doc)?,
        noun_length: lexical_sophistication(doc, LexClass::Noun),
        verb_length: lexical_sophistication(doc, LexClass::Verb),
        adj_length: lexical_sophistication(doc, LexClass::Adjective),
        adv_length: lexical_sophistication(doc, LexClass::Adverb),
        noun_ratio: lexical_density(doc, LexClass::Noun)?,
        verb_ratio: lexical_density(doc, LexClass::Verb)?,
        adj_ratio: lexical_density(doc, LexClass::Adjective)?,
        adv_ratio: lexical_density(doc, LexClass::Adverb)?,
        single_sentence,
    })
}
