//! Text to tagged sentences: segmentation, tokenization, tagging and clause
//! counting, plus the tagged-column interchange format.

pub mod segment;
pub mod tagger;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{normalize_abbreviations, AbbreviationTable, RawDocument};
pub use segment::{segment_sentences, tokenize, Token};
pub use tagger::{coarsen_tag, tag_tokens, LexClass, LexiconTagger, TaggedToken, Tagger};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("tagger returned {got} tags for {expected} tokens")]
    TaggerLengthMismatch { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub tokens: Vec<TaggedToken>,
    pub word_count: usize,
    pub clause_count: usize,
}

impl TaggedSentence {
    /// Builds a sentence whose clause count comes from [`count_clauses`].
    pub fn new(tokens: Vec<TaggedToken>) -> Self {
        let clause_count = count_clause_tags(tokens.iter().map(|t| t.fine_tag.as_str()));
        Self::with_clause_count(tokens, clause_count)
    }

    pub fn with_clause_count(tokens: Vec<TaggedToken>, clause_count: usize) -> Self {
        let word_count = tokens.iter().filter(|t| t.token.is_word).count();
        Self {
            tokens,
            word_count,
            clause_count,
        }
    }

    pub fn words(&self) -> impl Iterator<Item = &TaggedToken> {
        self.tokens.iter().filter(|t| t.token.is_word)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedDocument {
    pub doc_id: String,
    pub sentences: Vec<TaggedSentence>,
}

impl TaggedDocument {
    /// True when at least one sentence has a word; other documents are
    /// excluded from metrics.
    pub fn has_words(&self) -> bool {
        self.sentences.iter().any(|s| s.word_count > 0)
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(|s| s.word_count).sum()
    }
}

fn is_finite_tag(tag: &str) -> bool {
    matches!(tag, "VBD" | "VBZ" | "VBP")
}

/// Counts finite-verb anchors in a sentence.
///
/// Every `VBD`, `VBZ` or `VBP` is one clause. A modal `MD` is one clause when
/// a base-form `VB` follows it before the next finite tag or modal.
/// Participles and gerunds never count on their own.
pub fn count_clauses(sentence: &TaggedSentence) -> usize {
    count_clause_tags(sentence.tokens.iter().map(|t| t.fine_tag.as_str()))
}

fn count_clause_tags<'a>(tags: impl Iterator<Item = &'a str>) -> usize {
    let tags: Vec<&str> = tags.collect();
    let mut count = 0;
    for (i, tag) in tags.iter().enumerate() {
        if is_finite_tag(tag) {
            count += 1;
        } else if *tag == "MD" {
            let base = tags[i + 1..]
                .iter()
                .find(|t| **t == "VB" || **t == "MD" || is_finite_tag(t));
            if base == Some(&"VB") {
                count += 1;
            }
        }
    }
    count
}

/// Tags one sentence string with the given tagger.
pub fn tag_sentence(sentence: &str, tagger: &dyn Tagger) -> Result<TaggedSentence, PipelineError> {
    Ok(TaggedSentence::new(tag_tokens(tokenize(sentence), tagger)?))
}

/// Runs abbreviation expansion, segmentation, tokenization and tagging over
/// every paragraph of a document.
pub fn tag_document(
    doc: &RawDocument,
    table: &AbbreviationTable,
    tagger: &dyn Tagger,
) -> Result<TaggedDocument, PipelineError> {
    let mut sentences = Vec::new();
    for paragraph in &doc.paragraphs {
        let text = normalize_abbreviations(paragraph, table);
        for sentence in segment_sentences(&text) {
            let tagged = tag_sentence(&sentence, tagger)?;
            if !tagged.tokens.is_empty() {
                sentences.push(tagged);
            }
        }
    }
    Ok(TaggedDocument {
        doc_id: doc.doc_id.clone(),
        sentences,
    })
}

const DOC_ID_KEY: &str = "#doc_id=";
const CLAUSES_KEY: &str = "#clauses=";

/// Writes a document in the tagged-column format: a `#doc_id=` line, then
/// per sentence a `#clauses=N` line, `token TAB tag` lines and a blank line.
pub fn export_tagged(doc: &TaggedDocument) -> String {
    let mut out = String::new();
    writeln!(out, "{DOC_ID_KEY}{}", doc.doc_id).unwrap();
    for sentence in &doc.sentences {
        writeln!(out, "{CLAUSES_KEY}{}", sentence.clause_count).unwrap();
        for t in &sentence.tokens {
            writeln!(out, "{}\t{}", t.token.surface, t.fine_tag).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses the tagged-column format into documents. A `#doc_id=` line starts
/// a new document; text before the first one belongs to a document named
/// `default_doc_id`. Other `#` lines without a TAB are comments.
pub fn import_tagged_many(text: &str, default_doc_id: &str) -> Result<Vec<TaggedDocument>, PipelineError> {
    let mut docs: Vec<TaggedDocument> = Vec::new();
    let mut current = TaggedDocument {
        doc_id: default_doc_id.to_owned(),
        sentences: Vec::new(),
    };
    let mut tokens: Vec<TaggedToken> = Vec::new();
    let mut clauses: Option<usize> = None;
    let mut started = false;

    fn flush(doc: &mut TaggedDocument, tokens: &mut Vec<TaggedToken>, clauses: &mut Option<usize>) {
        if !tokens.is_empty() {
            let tokens = std::mem::take(tokens);
            doc.sentences.push(match clauses.take() {
                Some(n) => TaggedSentence::with_clause_count(tokens, n),
                None => TaggedSentence::new(tokens),
            });
        }
        *clauses = None;
    }

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        let err = |message: String| PipelineError::Format { line: line_no, message };
        if line.trim().is_empty() {
            flush(&mut current, &mut tokens, &mut clauses);
            continue;
        }
        if line.starts_with('#') && !line.contains('\t') {
            if let Some(id) = line.strip_prefix(DOC_ID_KEY) {
                flush(&mut current, &mut tokens, &mut clauses);
                if started || !current.sentences.is_empty() {
                    docs.push(std::mem::take(&mut current));
                }
                if id.trim().is_empty() {
                    return Err(err("empty doc_id".into()));
                }
                current.doc_id = id.trim().to_owned();
                started = true;
            } else if let Some(n) = line.strip_prefix(CLAUSES_KEY) {
                if !tokens.is_empty() {
                    return Err(err("#clauses must precede the sentence's tokens".into()));
                }
                clauses = Some(
                    n.trim()
                        .parse()
                        .map_err(|_| err(format!("bad clause count {n:?}")))?,
                );
            }
            continue;
        }
        let (surface, tag) = line
            .split_once('\t')
            .ok_or_else(|| err("expected token<TAB>tag".into()))?;
        if surface.is_empty() || tag.is_empty() || tag.contains('\t') {
            return Err(err("expected exactly one nonempty token and tag".into()));
        }
        if surface.chars().any(char::is_whitespace) {
            return Err(err(format!("token {surface:?} contains whitespace")));
        }
        tokens.push(TaggedToken::new(Token::new(surface), tag));
    }
    flush(&mut current, &mut tokens, &mut clauses);
    if started || !current.sentences.is_empty() {
        docs.push(current);
    }
    Ok(docs)
}

/// Parses a single document in the tagged-column format.
pub fn import_tagged(text: &str, default_doc_id: &str) -> Result<TaggedDocument, PipelineError> {
    let mut docs = import_tagged_many(text, default_doc_id)?;
    match docs.len() {
        0 => Ok(TaggedDocument {
            doc_id: default_doc_id.to_owned(),
            sentences: Vec::new(),
        }),
        1 => Ok(docs.pop().unwrap()),
        n => Err(PipelineError::Format {
            line: 0,
            message: format!("expected one document, found {n}"),
        }),
    }
}
