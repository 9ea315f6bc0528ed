//! Interchange files: CSV (RFC 4180, CRLF) and line-delimited JSON, each
//! preceded by a metadata header block.
//!
//! CSV headers are `# key=value` lines before the column header row. JSON
//! Lines files start with a single `{"meta": {...}}` record.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::impact::{Baseline, CitationRecord, ImpactGroup, NormalizedScore};
use crate::metrics::{ComplexityProfile, VARIABLE_COUNT, VARIABLE_NAMES};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{file}: {message}")]
    Format { file: String, message: String },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
}

/// Key/value pairs written at the top of every output file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata {
    entries: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace(['\r', '\n'], " ");
        self.entries.insert(key.to_owned(), value);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn csv_header(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("# {k}={v}\r\n"))
            .collect()
    }

    pub fn json_header(&self) -> String {
        let mut line = serde_json::json!({ "meta": self.entries }).to_string();
        line.push('\n');
        line
    }

    /// Reads the `# key=value` block at the top of a CSV file.
    pub fn parse_csv_header(text: &str) -> Self {
        let mut meta = Self::new();
        for line in text.lines() {
            let Some(rest) = line.strip_prefix("# ") else { break };
            if let Some((k, v)) = rest.trim_end_matches('\r').split_once('=') {
                meta.entries.insert(k.to_owned(), v.to_owned());
            }
        }
        meta
    }
}

/// Formats a float with the shortest representation that round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Writes a CSV document with the metadata header.
pub fn write_csv(meta: &Metadata, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 input");
    meta.csv_header() + &body
}

fn strip_header(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with("# ") {
        rest = match rest.find('\n') {
            Some(i) => &rest[i + 1..],
            None => "",
        };
    }
    rest
}

/// Parses a CSV document (after any metadata block), checking the column
/// header. Returns the data rows.
pub fn read_csv(file: &str, text: &str, expected: &[&str]) -> Result<Vec<Vec<String>>, ReportError> {
    let body = strip_header(text);
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let csv_err = |source| ReportError::Csv { file: file.to_owned(), source };
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    if header != expected {
        return Err(ReportError::Format {
            file: file.to_owned(),
            message: format!("expected columns {expected:?}, found {header:?}"),
        });
    }
    r.records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_owned).collect()).map_err(csv_err))
        .collect()
}

fn parse_field<T: std::str::FromStr>(file: &str, row: usize, column: &str, value: &str) -> Result<T, ReportError> {
    value.parse().map_err(|_| ReportError::Format {
        file: file.to_owned(),
        message: format!("row {row}: bad {column} {value:?}"),
    })
}

pub const PROFILE_COLUMNS: [&str; 13] = [
    "doc_id", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11", "x12",
];

/// Profile table: `doc_id, x1..x12`, absent values as empty cells.
pub fn profiles_csv(meta: &Metadata, profiles: &[ComplexityProfile]) -> String {
    let rows: Vec<Vec<String>> = profiles
        .iter()
        .map(|p| {
            std::iter::once(p.doc_id.clone())
                .chain(p.values().iter().map(|v| fmt_opt(*v)))
                .collect()
        })
        .collect();
    write_csv(meta, &PROFILE_COLUMNS, &rows)
}

pub fn read_profiles_csv(text: &str) -> Result<Vec<ComplexityProfile>, ReportError> {
    const FILE: &str = "profiles.csv";
    read_csv(FILE, text, &PROFILE_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut values = [None; VARIABLE_COUNT];
            for (j, cell) in row[1..].iter().enumerate() {
                if !cell.is_empty() {
                    values[j] = Some(parse_field::<f64>(FILE, i + 1, VARIABLE_NAMES[j], cell)?);
                }
            }
            ComplexityProfile::from_values(row[0].clone(), values).ok_or_else(|| ReportError::Format {
                file: FILE.to_owned(),
                message: format!("row {}: only x5..x8 may be empty", i + 1),
            })
        })
        .collect()
}

/// JSON Lines mirror of the profile table.
pub fn profiles_jsonl(meta: &Metadata, profiles: &[ComplexityProfile]) -> String {
    #[derive(Serialize)]
    struct Row<'a> {
        doc_id: &'a str,
        x1: f64,
        x2: f64,
        x3: f64,
        x4: f64,
        x5: Option<f64>,
        x6: Option<f64>,
        x7: Option<f64>,
        x8: Option<f64>,
        x9: f64,
        x10: f64,
        x11: f64,
        x12: f64,
    }
    let mut out = meta.json_header();
    for p in profiles {
        let row = Row {
            doc_id: &p.doc_id,
            x1: p.mean_sentence_length,
            x2: p.sd_sentence_length,
            x3: p.clause_ratio,
            x4: p.ttr,
            x5: p.noun_length,
            x6: p.verb_length,
            x7: p.adj_length,
            x8: p.adv_length,
            x9: p.noun_ratio,
            x10: p.verb_ratio,
            x11: p.adj_ratio,
            x12: p.adv_ratio,
        };
        out.push_str(&serde_json::to_string(&row).expect("profile serializes"));
        out.push('\n');
    }
    out
}

pub const CITATION_COLUMNS: [&str; 4] = ["doc_id", "year", "domain", "total_citations"];

pub fn read_citations_csv(text: &str) -> Result<Vec<CitationRecord>, ReportError> {
    const FILE: &str = "citations";
    read_csv(FILE, text, &CITATION_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            Ok(CitationRecord {
                doc_id: row[0].clone(),
                year: parse_field(FILE, i + 1, "year", &row[1])?,
                domain: row[2].clone(),
                total_citations: parse_field(FILE, i + 1, "total_citations", &row[3])?,
            })
        })
        .collect()
}

pub fn citations_csv(meta: &Metadata, records: &[CitationRecord]) -> String {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| vec![r.doc_id.clone(), r.year.to_string(), r.domain.clone(), r.total_citations.to_string()])
        .collect();
    write_csv(meta, &CITATION_COLUMNS, &rows)
}

pub const BASELINE_COLUMNS: [&str; 4] = ["year", "domain", "adc", "n"];

pub fn baselines_csv(meta: &Metadata, baselines: &[Baseline]) -> String {
    let rows: Vec<Vec<String>> = baselines
        .iter()
        .map(|b| vec![b.year.to_string(), b.domain.clone(), fmt_f64(b.adc), b.n.to_string()])
        .collect();
    write_csv(meta, &BASELINE_COLUMNS, &rows)
}

pub fn read_baselines_csv(text: &str) -> Result<Vec<Baseline>, ReportError> {
    const FILE: &str = "baselines";
    read_csv(FILE, text, &BASELINE_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            Ok(Baseline {
                year: parse_field(FILE, i + 1, "year", &row[0])?,
                domain: row[1].clone(),
                adc: parse_field(FILE, i + 1, "adc", &row[2])?,
                n: parse_field(FILE, i + 1, "n", &row[3])?,
            })
        })
        .collect()
}

pub const SCORE_COLUMNS: [&str; 3] = ["doc_id", "nc", "group"];

/// Scores table; the group cell is empty before stratification.
pub fn scores_csv(meta: &Metadata, scores: &[NormalizedScore]) -> String {
    let rows: Vec<Vec<String>> = scores
        .iter()
        .map(|s| {
            vec![
                s.doc_id.clone(),
                fmt_f64(s.nc),
                s.group.map(|g| g.as_str().to_owned()).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(meta, &SCORE_COLUMNS, &rows)
}

pub fn read_scores_csv(text: &str) -> Result<Vec<NormalizedScore>, ReportError> {
    const FILE: &str = "scores";
    read_csv(FILE, text, &SCORE_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let group = if row[2].is_empty() {
                None
            } else {
                Some(row[2].parse::<ImpactGroup>().map_err(|e| ReportError::Format {
                    file: FILE.to_owned(),
                    message: format!("row {}: {e}", i + 1),
                })?)
            };
            Ok(NormalizedScore {
                doc_id: row[0].clone(),
                nc: parse_field(FILE, i + 1, "nc", &row[1])?,
                group,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata::new().with("seed", 42).with("tool", "lingcx 0.1.0")
    }

    #[test]
    fn header_block_round_trips() {
        let text = write_csv(&meta(), &["a", "b"], &[vec!["1".into(), "x,y".into()]]);
        assert_eq!(text, "# seed=42\r\n# tool=lingcx 0.1.0\r\na,b\r\n1,\"x,y\"\r\n");
        assert_eq!(Metadata::parse_csv_header(&text), meta());
        assert_eq!(read_csv("t", &text, &["a", "b"]).unwrap(), vec![vec!["1", "x,y"]]);
        assert!(read_csv("t", &text, &["a", "c"]).is_err());
    }

    #[test]
    fn hash_leading_ids_survive() {
        let text = write_csv(&meta(), &["doc_id"], &[vec!["#1".into()]]);
        assert_eq!(read_csv("t", &text, &["doc_id"]).unwrap(), vec![vec!["#1"]]);
    }

    #[test]
    fn profiles_round_trip_with_absent_cells() {
        let mut p = ComplexityProfile::from_values("d,1", std::array::from_fn(|i| Some(i as f64 / 3.0 + 1.0))).unwrap();
        p.adv_length = None;
        let text = profiles_csv(&meta(), std::slice::from_ref(&p));
        assert!(text.contains(",,"), "{text}");
        assert_eq!(read_profiles_csv(&text).unwrap(), vec![p.clone()]);
        let json = profiles_jsonl(&meta(), &[p]);
        let lines: Vec<&str> = json.lines().collect();
        assert!(lines[0].starts_with("{\"meta\":"));
        assert!(lines[1].starts_with("{\"doc_id\":\"d,1\",\"x1\":1.0,"), "{}", lines[1]);
        assert!(lines[1].contains("\"x8\":null"));
    }

    #[test]
    fn scores_and_baselines_round_trip() {
        let scores = vec![
            NormalizedScore { doc_id: "a".into(), nc: 2.5, group: Some(ImpactGroup::High) },
            NormalizedScore { doc_id: "b".into(), nc: 0.0, group: None },
        ];
        assert_eq!(read_scores_csv(&scores_csv(&meta(), &scores)).unwrap(), scores);
        let baselines = vec![Baseline { year: 2010, domain: "Ecology".into(), adc: 1.0 / 3.0, n: 3 }];
        assert_eq!(read_baselines_csv(&baselines_csv(&meta(), &baselines)).unwrap(), baselines);
    }

    #[test]
    fn citations_parse_errors() {
        let ok = "doc_id,year,domain,total_citations\nd1,2010,Ecology,4\n";
        assert_eq!(read_citations_csv(ok).unwrap()[0].total_citations, 4);
        let bad = "doc_id,year,domain,total_citations\nd1,2010,Ecology,-4\n";
        assert!(matches!(read_citations_csv(bad), Err(ReportError::Format { .. })));
        let wrong = "id,year\nd1,2010\n";
        assert!(read_citations_csv(wrong).is_err());
    }
}
