//! Article ingestion: JATS-style XML to [`RawDocument`], plus abbreviation
//! expansion ahead of sentence segmentation.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed XML at byte {position}: {message}")]
    MalformedXml { position: u64, message: String },
    #[error("missing metadata: {0}")]
    MissingMetadata(String),
    #[error("invalid abbreviation entry on line {line}: {message}")]
    InvalidAbbreviation { line: usize, message: String },
    #[error("duplicate doc_id {0:?} in corpus")]
    DuplicateDocId(String),
    #[error("corpus line {line}: {message}")]
    CorpusFormat { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// An ingested article: metadata plus the ordered text of its paragraphs.
///
/// Field order here is the serialized field order of the corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub doc_id: String,
    pub year: i32,
    pub domain: String,
    pub journal: Option<String>,
    pub paragraphs: Vec<String>,
}

/// Element paths used to locate article metadata.
///
/// A path matches when its segments equal the innermost segments of the
/// currently open element stack, so `["pub-date", "year"]` matches
/// `article/front/article-meta/pub-date/year`. The first match in document
/// order wins.
#[derive(Debug, Clone)]
pub struct MetadataPaths {
    pub doc_id: Vec<String>,
    pub year: Vec<String>,
    pub domain: Vec<String>,
    pub journal: Vec<String>,
}

impl Default for MetadataPaths {
    fn default() -> Self {
        let p = |s: &str| s.split('/').map(str::to_owned).collect();
        Self {
            doc_id: p("article-meta/article-id"),
            year: p("pub-date/year"),
            domain: p("subj-group/subject"),
            journal: p("journal-title"),
        }
    }
}

/// Domain label used when an article carries no subject classification.
pub const UNCLASSIFIED_DOMAIN: &str = "unclassified";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    DocId,
    Year,
    Domain,
    Journal,
}

const FIELDS: [Field; 4] = [Field::DocId, Field::Year, Field::Domain, Field::Journal];

impl MetadataPaths {
    fn path(&self, field: Field) -> &[String] {
        match field {
            Field::DocId => &self.doc_id,
            Field::Year => &self.year,
            Field::Domain => &self.domain,
            Field::Journal => &self.journal,
        }
    }
}

fn stack_ends_with(stack: &[String], path: &[String]) -> bool {
    !path.is_empty() && stack.len() >= path.len() && stack[stack.len() - path.len()..] == *path
}

fn resolve_entity(name: &str) -> Option<&'static str> {
    // Named entities that commonly survive DTD-less extraction of JATS files.
    Some(match name {
        "amp" => "&",
        "lt" => "<",
        "gt" => ">",
        "quot" => "\"",
        "apos" => "'",
        "nbsp" => "\u{a0}",
        "ndash" => "\u{2013}",
        "mdash" => "\u{2014}",
        "hellip" => "\u{2026}",
        "plusmn" => "\u{b1}",
        "times" => "\u{d7}",
        "deg" => "\u{b0}",
        "micro" => "\u{b5}",
        "lsquo" => "\u{2018}",
        "rsquo" => "\u{2019}",
        "ldquo" => "\u{201c}",
        "rdquo" => "\u{201d}",
        _ => return None,
    })
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn local_name(e: &BytesStart<'_>) -> String {
    String::from_utf8_lossy(e.local_name().as_ref()).into_owned()
}

/// Parses one article using the default metadata paths.
pub fn parse_jats(xml_text: &str) -> Result<RawDocument, IngestError> {
    parse_jats_with(xml_text, &MetadataPaths::default())
}

/// Parses one article. Paragraphs are the text content of every `<p>`
/// element in document order; a `<p>` nested inside another `<p>`
/// contributes to its outermost ancestor.
pub fn parse_jats_with(xml_text: &str, paths: &MetadataPaths) -> Result<RawDocument, IngestError> {
    let mut reader = Reader::from_str(xml_text);
    reader.config_mut().check_end_names = true;

    let mut stack: Vec<String> = Vec::new();
    let mut paragraphs = Vec::new();
    let mut current: Option<String> = None;
    let mut p_depth = 0usize;
    let mut meta: [Option<String>; 4] = Default::default();
    // Buffers for metadata fields currently being read, keyed by field index.
    let mut meta_buf: [Option<(usize, String)>; 4] = Default::default();

    let malformed = |reader: &Reader<&[u8]>, message: String| IngestError::MalformedXml {
        position: reader.buffer_position(),
        message,
    };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| malformed(&reader, e.to_string()))?;
        match event {
            Event::Start(e) => {
                let name = local_name(&e);
                stack.push(name.clone());
                for (i, field) in FIELDS.iter().enumerate() {
                    if meta[i].is_none()
                        && meta_buf[i].is_none()
                        && stack_ends_with(&stack, paths.path(*field))
                    {
                        meta_buf[i] = Some((stack.len(), String::new()));
                    }
                }
                if name == "p" {
                    if p_depth == 0 {
                        current = Some(String::new());
                    } else if let Some(buf) = current.as_mut() {
                        buf.push(' ');
                    }
                    p_depth += 1;
                }
            }
            Event::End(_) => {
                let depth = stack.len();
                for i in 0..FIELDS.len() {
                    if matches!(&meta_buf[i], Some((d, _)) if *d == depth) {
                        let (_, text) = meta_buf[i].take().unwrap();
                        let text = collapse_whitespace(&text);
                        if !text.is_empty() {
                            meta[i] = Some(text);
                        }
                    }
                }
                if stack.pop().as_deref() == Some("p") {
                    p_depth -= 1;
                    if p_depth == 0 {
                        let text = collapse_whitespace(&current.take().unwrap_or_default());
                        if !text.is_empty() {
                            paragraphs.push(text);
                        }
                    }
                }
            }
            Event::Empty(_) => {}
            Event::Text(t) => {
                let text = t
                    .unescape_with(resolve_entity)
                    .map_err(|e| malformed(&reader, e.to_string()))?;
                push_text(&text, &mut current, &mut meta_buf);
            }
            Event::CData(t) => {
                let text = String::from_utf8_lossy(&t).into_owned();
                push_text(&text, &mut current, &mut meta_buf);
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(IngestError::MalformedXml {
            position: reader.buffer_position(),
            message: format!("unclosed element <{}>", stack.last().unwrap()),
        });
    }

    let [doc_id, year, domain, journal] = meta;
    let doc_id = doc_id.ok_or_else(|| IngestError::MissingMetadata("doc_id".into()))?;
    let year_text = year.ok_or_else(|| IngestError::MissingMetadata(format!("year ({doc_id})")))?;
    let year: i32 = year_text.trim().parse().map_err(|_| {
        IngestError::MissingMetadata(format!("year {year_text:?} is not an integer ({doc_id})"))
    })?;
    if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
        return Err(IngestError::MissingMetadata(format!(
            "year {year} outside [{MIN_YEAR}, {MAX_YEAR}] ({doc_id})"
        )));
    }
    if paragraphs.is_empty() {
        return Err(IngestError::MissingMetadata(format!(
            "no <p> paragraphs, empty body ({doc_id})"
        )));
    }
    Ok(RawDocument {
        doc_id,
        year,
        domain: domain.unwrap_or_else(|| UNCLASSIFIED_DOMAIN.to_owned()),
        journal,
        paragraphs,
    })
}

fn push_text(text: &str, current: &mut Option<String>, meta_buf: &mut [Option<(usize, String)>; 4]) {
    if let Some(buf) = current.as_mut() {
        buf.push_str(text);
    }
    for (_, buf) in meta_buf.iter_mut().flatten() {
        buf.push_str(text);
    }
}

/// Abbreviations and their expansions.
///
/// Keys end with `.`; expansions contain no `.`, which makes expansion
/// idempotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbbreviationTable {
    entries: BTreeMap<String, String>,
    // Keys sorted longest first, ties in lexical order.
    ordered: Vec<String>,
}

impl AbbreviationTable {
    pub fn new<I, K, V>(entries: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (i, (k, v)) in entries.into_iter().enumerate() {
            let (k, v) = (k.into(), v.into());
            validate_entry(&k, &v).map_err(|message| IngestError::InvalidAbbreviation {
                line: i + 1,
                message,
            })?;
            map.insert(k, v);
        }
        Ok(Self::from_map(map))
    }

    fn from_map(entries: BTreeMap<String, String>) -> Self {
        let mut ordered: Vec<String> = entries.keys().cloned().collect();
        ordered.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Self { entries, ordered }
    }

    /// Parses a `key TAB expansion` file. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn from_tsv(text: &str) -> Result<Self, IngestError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| IngestError::InvalidAbbreviation { line: i + 1, message };
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| err("expected `key<TAB>expansion`".into()))?;
            validate_entry(k, v).map_err(err)?;
            map.insert(k.to_owned(), v.to_owned());
        }
        Ok(Self::from_map(map))
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_tsv(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

fn validate_entry(key: &str, expansion: &str) -> Result<(), String> {
    if key.trim() != key || key.len() < 2 {
        return Err(format!("bad key {key:?}"));
    }
    if !key.ends_with('.') {
        return Err(format!("key {key:?} must end with '.'"));
    }
    if expansion.contains('.') {
        return Err(format!("expansion {expansion:?} must not contain '.'"));
    }
    if expansion.trim().is_empty() {
        return Err(format!("empty expansion for {key:?}"));
    }
    Ok(())
}

impl Default for AbbreviationTable {
    fn default() -> Self {
        Self::new([
            ("et al.", "and others"),
            ("e.g.", "for example"),
            ("i.e.", "that is"),
            ("cf.", "compare"),
            ("Fig.", "Figure"),
            ("Figs.", "Figures"),
            ("Eq.", "Equation"),
            ("Eqs.", "Equations"),
            ("Dr.", "Doctor"),
            ("vs.", "versus"),
            ("approx.", "approximately"),
        ])
        .expect("default abbreviation table is valid")
    }
}

/// Replaces every table key that starts at a word boundary with its
/// expansion, trying longer keys first.
pub fn normalize_abbreviations(text: &str, table: &AbbreviationTable) -> String {
    if table.is_empty() {
        return text.to_owned();
    }
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    let mut prev: Option<char> = None;
    'outer: while i < text.len() {
        let rest = &text[i..];
        if !prev.is_some_and(char::is_alphanumeric) {
            for key in &table.ordered {
                if rest.starts_with(key.as_str()) {
                    out.push_str(&table.entries[key]);
                    i += key.len();
                    prev = Some('.');
                    continue 'outer;
                }
            }
        }
        let c = rest.chars().next().unwrap();
        out.push(c);
        prev = Some(c);
        i += c.len_utf8();
    }
    out
}

/// Returns a copy of `doc` with abbreviations expanded in every paragraph.
pub fn normalize_document(doc: &RawDocument, table: &AbbreviationTable) -> RawDocument {
    RawDocument {
        paragraphs: doc
            .paragraphs
            .iter()
            .map(|p| normalize_abbreviations(p, table))
            .collect(),
        ..doc.clone()
    }
}

/// A document that could not be ingested, with the reason.
#[derive(Debug)]
pub struct Rejected {
    pub path: PathBuf,
    pub error: IngestError,
}

/// Result of ingesting a directory tree.
#[derive(Debug, Default)]
pub struct Corpus {
    /// Accepted documents, sorted by `doc_id`.
    pub documents: Vec<RawDocument>,
    pub rejected: Vec<Rejected>,
}

fn collect_xml_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), IngestError> {
    let io = |source| IngestError::Io { path: dir.to_owned(), source };
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_dir() {
            collect_xml_files(&path, out)?;
        } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
            out.push(path);
        }
    }
    Ok(())
}

/// Parses every `*.xml` file below `dir` in parallel. Unparseable files and
/// files without usable metadata are rejected and logged; duplicate ids are
/// a hard error.
pub fn ingest_dir(dir: &Path, paths: &MetadataPaths) -> Result<Corpus, IngestError> {
    let mut files = Vec::new();
    collect_xml_files(dir, &mut files)?;
    files.sort();

    let results: Vec<(PathBuf, Result<RawDocument, IngestError>)> = files
        .into_par_iter()
        .map(|path| {
            let parsed = fs::read_to_string(&path)
                .map_err(|source| IngestError::Io { path: path.clone(), source })
                .and_then(|xml| parse_jats_with(&xml, paths));
            (path, parsed)
        })
        .collect();

    let mut corpus = Corpus::default();
    for (path, result) in results {
        match result {
            Ok(doc) => corpus.documents.push(doc),
            Err(error) => {
                log::warn!("rejected {}: {error}", path.display());
                corpus.rejected.push(Rejected { path, error });
            }
        }
    }
    corpus.documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    let mut seen = HashSet::new();
    for doc in &corpus.documents {
        if !seen.insert(doc.doc_id.as_str()) {
            return Err(IngestError::DuplicateDocId(doc.doc_id.clone()));
        }
    }
    Ok(corpus)
}

/// Serializes documents as line-delimited JSON, one document per line.
pub fn write_corpus_jsonl(docs: &[RawDocument]) -> String {
    let mut out = String::new();
    for doc in docs {
        out.push_str(&serde_json::to_string(doc).expect("RawDocument serializes"));
        out.push('\n');
    }
    out
}

/// Reads line-delimited JSON documents. Blank lines and `{"meta": ...}`
/// header records are skipped.
pub fn read_corpus_jsonl(text: &str) -> Result<Vec<RawDocument>, IngestError> {
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| IngestError::CorpusFormat {
                line: i + 1,
                message: e.to_string(),
            })?;
        if value.get("meta").is_some() {
            continue;
        }
        let doc: RawDocument =
            serde_json::from_value(value).map_err(|e| IngestError::CorpusFormat {
                line: i + 1,
                message: e.to_string(),
            })?;
        docs.push(doc);
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn article(body: &str) -> String {
        format!(
            r#"<?xml version="1.0" encoding="UTF-8"?>
<article>
  <front>
    <journal-meta><journal-title-group><journal-title>PLoS ONE</journal-title></journal-title-group></journal-meta>
    <article-meta>
      <article-id pub-id-type="doi">10.1371/journal.pone.0000001</article-id>
      <article-categories><subj-group><subject>Ecology</subject></subj-group></article-categories>
      <pub-date pub-type="epub"><day>1</day><month>2</month><year>2010</year></pub-date>
    </article-meta>
  </front>
  <body>{body}</body>
</article>"#
        )
    }

    #[test]
    fn paragraphs_in_document_order() {
        let doc = parse_jats(&article("<sec><p>A b.</p><p>C d.</p></sec>")).unwrap();
        assert_eq!(doc.paragraphs, vec!["A b.", "C d."]);
        assert_eq!(doc.doc_id, "10.1371/journal.pone.0000001");
        assert_eq!(doc.year, 2010);
        assert_eq!(doc.domain, "Ecology");
        assert_eq!(doc.journal.as_deref(), Some("PLoS ONE"));
    }

    #[test]
    fn inline_tags_are_stripped() {
        let doc = parse_jats(&article("<p>x <i>y</i> z</p>")).unwrap();
        assert_eq!(doc.paragraphs, vec!["x y z"]);
    }

    #[test]
    fn entities_are_decoded() {
        let doc = parse_jats(&article("<p>p &lt; 0.05 &amp; n&#x2009;=&#160;3&ndash;4</p>")).unwrap();
        // Thin and no-break spaces are whitespace and collapse like any other.
        assert_eq!(doc.paragraphs, vec!["p < 0.05 & n = 3\u{2013}4"]);
    }

    #[test]
    fn captions_outside_p_are_excluded() {
        let body = "<p>Kept <xref ref-type=\"bibr\">[1]</xref>.</p>\
                    <fig><label>Figure 1</label><caption><title>Dropped</title></caption></fig>";
        let doc = parse_jats(&article(body)).unwrap();
        assert_eq!(doc.paragraphs, vec!["Kept [1]."]);
    }

    #[test]
    fn nested_paragraph_joins_its_parent() {
        let body = "<p>Items:<list><list-item><p>one</p></list-item></list></p><p>after</p>";
        let doc = parse_jats(&article(body)).unwrap();
        assert_eq!(doc.paragraphs, vec!["Items: one", "after"]);
    }

    #[test]
    fn zero_paragraphs_rejected() {
        let err = parse_jats(&article("<sec><title>Empty</title></sec>")).unwrap_err();
        assert!(matches!(err, IngestError::MissingMetadata(_)), "{err}");
    }

    #[test]
    fn missing_id_or_year_rejected() {
        let xml = article("<p>x</p>").replace("<year>2010</year>", "");
        assert!(matches!(parse_jats(&xml), Err(IngestError::MissingMetadata(_))));
        let xml = article("<p>x</p>").replace(
            "<article-id pub-id-type=\"doi\">10.1371/journal.pone.0000001</article-id>",
            "",
        );
        assert!(matches!(parse_jats(&xml), Err(IngestError::MissingMetadata(_))));
        let xml = article("<p>x</p>").replace("2010", "1850");
        assert!(matches!(parse_jats(&xml), Err(IngestError::MissingMetadata(_))));
    }

    #[test]
    fn malformed_xml_rejected() {
        let err = parse_jats("<article><p>open</article>").unwrap_err();
        assert!(matches!(err, IngestError::MalformedXml { .. }), "{err}");
        let err = parse_jats("<article><p>open</p>").unwrap_err();
        assert!(matches!(err, IngestError::MalformedXml { .. }), "{err}");
    }

    #[test]
    fn missing_domain_defaults() {
        let xml = article("<p>x</p>").replace("<subject>Ecology</subject>", "");
        assert_eq!(parse_jats(&xml).unwrap().domain, UNCLASSIFIED_DOMAIN);
    }

    #[test]
    fn custom_metadata_paths() {
        let xml = "<doc><meta><id>abc</id><when>1999</when></meta><text><p>Hi.</p></text></doc>";
        let paths = MetadataPaths {
            doc_id: vec!["meta".into(), "id".into()],
            year: vec!["when".into()],
            domain: vec!["nothing".into()],
            journal: vec!["nothing".into()],
        };
        let doc = parse_jats_with(xml, &paths).unwrap();
        assert_eq!((doc.doc_id.as_str(), doc.year), ("abc", 1999));
        assert_eq!(doc.journal, None);
    }

    #[test]
    fn et_al_expands() {
        let table = AbbreviationTable::new([("et al.", "and others")]).unwrap();
        assert_eq!(
            normalize_abbreviations("Smith et al. found X.", &table),
            "Smith and others found X."
        );
    }

    #[test]
    fn text_without_keys_unchanged() {
        let table = AbbreviationTable::default();
        let text = "Nothing to see here. Really.";
        assert_eq!(normalize_abbreviations(text, &table), text);
    }

    #[test]
    fn several_keys_in_one_string() {
        let table = AbbreviationTable::new([("cf.", "compare"), ("Fig.", "Figure")]).unwrap();
        assert_eq!(normalize_abbreviations("cf. Fig. 1.", &table), "compare Figure 1.");
    }

    #[test]
    fn longest_key_wins_and_boundaries_hold() {
        let table = AbbreviationTable::new([("Fig.", "Figure"), ("Figs.", "Figures")]).unwrap();
        assert_eq!(normalize_abbreviations("see Figs. 2", &table), "see Figures 2");
        // "Fig." inside a longer word is not at a word boundary.
        assert_eq!(normalize_abbreviations("subFig. 2", &table), "subFig. 2");
    }

    #[test]
    fn table_validation() {
        assert!(AbbreviationTable::new([("etc", "and so on")]).is_err());
        assert!(AbbreviationTable::new([("e.g.", "e.g")]).is_err());
        let err = AbbreviationTable::from_tsv("# comment\nvs.\tversus\nbroken line\n").unwrap_err();
        assert!(matches!(err, IngestError::InvalidAbbreviation { line: 3, .. }));
        let t = AbbreviationTable::from_tsv("vs.\tversus\n\nca.\tcirca\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("ca."), Some("circa"));
    }

    #[test]
    fn corpus_jsonl_field_order() {
        let doc = RawDocument {
            doc_id: "d1".into(),
            year: 2012,
            domain: "Cancer".into(),
            journal: None,
            paragraphs: vec!["A.".into()],
        };
        let text = write_corpus_jsonl(std::slice::from_ref(&doc));
        assert_eq!(
            text,
            "{\"doc_id\":\"d1\",\"year\":2012,\"domain\":\"Cancer\",\"journal\":null,\"paragraphs\":[\"A.\"]}\n"
        );
        let back = read_corpus_jsonl(&format!("{{\"meta\":{{\"seed\":1}}}}\n{text}")).unwrap();
        assert_eq!(back, vec![doc]);
    }

    #[test]
    fn ingest_dir_sorts_and_rejects() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("nested");
        fs::create_dir(&sub).unwrap();
        let a = article("<p>one</p>").replace("pone.0000001", "zzz");
        let b = article("<p>two</p>").replace("pone.0000001", "aaa");
        fs::write(dir.path().join("a.xml"), a).unwrap();
        fs::write(sub.join("b.XML"), b).unwrap();
        fs::write(dir.path().join("bad.xml"), "<article>").unwrap();
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let corpus = ingest_dir(dir.path(), &MetadataPaths::default()).unwrap();
        let ids: Vec<_> = corpus.documents.iter().map(|d| d.doc_id.as_str()).collect();
        assert_eq!(ids, vec!["10.1371/journal.aaa", "10.1371/journal.zzz"]);
        assert_eq!(corpus.rejected.len(), 1);

        fs::write(dir.path().join("dup.xml"), article("<p>dup</p>").replace("pone.0000001", "aaa"))
            .unwrap();
        assert!(matches!(
            ingest_dir(dir.path(), &MetadataPaths::default()),
            Err(IngestError::DuplicateDocId(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalization_is_idempotent(text in "[A-Za-z .,()0-9]{0,80}") {
                let table = AbbreviationTable::default();
                let once = normalize_abbreviations(&text, &table);
                prop_assert_eq!(normalize_abbreviations(&once, &table), once.clone());
            }

            #[test]
            fn paragraphs_carry_no_markup(words in proptest::collection::vec("[a-z]{1,8}", 1..12)) {
                let body: String = words
                    .iter()
                    .enumerate()
                    .map(|(i, w)| if i % 3 == 0 { format!("<p>{w} <b>{w}</b></p>") } else { format!("<p>{w}</p>") })
                    .collect();
                let xml = article(&body);
                let doc = parse_jats(&xml).unwrap();
                prop_assert_eq!(&doc, &parse_jats(&xml).unwrap());
                for p in &doc.paragraphs {
                    prop_assert!(!p.contains('<') && !p.contains('>'));
                }
            }
        }
    }
}
