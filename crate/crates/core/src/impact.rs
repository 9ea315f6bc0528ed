//! Field- and year-normalized citation scores and impact strata.
//!
//! A paper's normalized citation score is its citation count divided by the
//! mean citation count of all papers from the same publication year and
//! domain. Papers are then ranked by score: the top 1% form the high-impact
//! group, the next 9% the medium group, and the remainder the low group.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ImpactError {
    #[error("no baseline for year {year}, domain {domain:?} (document {doc_id:?})")]
    MissingBaseline { doc_id: String, year: i32, domain: String },
    #[error(
        "baseline for year {year}, domain {domain:?} has mean 0 but document {doc_id:?} has {citations} citations"
    )]
    ZeroBaselineNonzeroCitations {
        doc_id: String,
        year: i32,
        domain: String,
        citations: u64,
    },
    #[error("invalid baseline for year {year}, domain {domain:?}: {message}")]
    InvalidBaseline { year: i32, domain: String, message: String },
    #[error("unknown impact group {0:?}")]
    UnknownGroup(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationRecord {
    pub doc_id: String,
    pub year: i32,
    pub domain: String,
    pub total_citations: u64,
}

/// Mean citations of one (year, domain) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub year: i32,
    pub domain: String,
    pub adc: f64,
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ImpactGroup {
    High,
    Medium,
    Low,
}

impl ImpactGroup {
    pub const ALL: [ImpactGroup; 3] = [ImpactGroup::High, ImpactGroup::Medium, ImpactGroup::Low];

    /// Pairs compared against each other, in report order.
    pub const PAIRS: [(ImpactGroup, ImpactGroup); 3] = [
        (ImpactGroup::High, ImpactGroup::Medium),
        (ImpactGroup::High, ImpactGroup::Low),
        (ImpactGroup::Medium, ImpactGroup::Low),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ImpactGroup::High => "High",
            ImpactGroup::Medium => "Medium",
            ImpactGroup::Low => "Low",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ImpactGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ImpactGroup {
    type Err = ImpactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "High" | "G1" => Ok(ImpactGroup::High),
            "Medium" | "G2" => Ok(ImpactGroup::Medium),
            "Low" | "G3" => Ok(ImpactGroup::Low),
            other => Err(ImpactError::UnknownGroup(other.to_owned())),
        }
    }
}

/// A normalized score; `group` stays `None` until [`stratify`] runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedScore {
    pub doc_id: String,
    pub nc: f64,
    pub group: Option<ImpactGroup>,
}

/// One baseline per (year, domain) cell, ordered by year then domain.
pub fn compute_baselines(records: &[CitationRecord]) -> Vec<Baseline> {
    let mut cells: BTreeMap<(i32, &str), (u64, u64)> = BTreeMap::new();
    for r in records {
        let cell = cells.entry((r.year, r.domain.as_str())).or_default();
        cell.0 += r.total_citations;
        cell.1 += 1;
    }
    cells
        .into_iter()
        .map(|((year, domain), (sum, n))| Baseline {
            year,
            domain: domain.to_owned(),
            adc: sum as f64 / n as f64,
            n,
        })
        .collect()
}

/// Baselines indexed by cell.
#[derive(Debug, Clone, Default)]
pub struct BaselineIndex {
    cells: BTreeMap<(i32, String), Baseline>,
}

impl BaselineIndex {
    pub fn new(baselines: impl IntoIterator<Item = Baseline>) -> Result<Self, ImpactError> {
        let mut cells = BTreeMap::new();
        for b in baselines {
            let invalid = |message: &str| ImpactError::InvalidBaseline {
                year: b.year,
                domain: b.domain.clone(),
                message: message.to_owned(),
            };
            if !(b.adc.is_finite() && b.adc >= 0.0) {
                return Err(invalid("adc must be a nonnegative number"));
            }
            if b.n == 0 {
                return Err(invalid("n must be at least 1"));
            }
            let key = (b.year, b.domain.clone());
            if cells.insert(key, b.clone()).is_some() {
                return Err(invalid("duplicate cell"));
            }
        }
        Ok(Self { cells })
    }

    pub fn get(&self, year: i32, domain: &str) -> Option<&Baseline> {
        self.cells.get(&(year, domain.to_owned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Baseline> {
        self.cells.values()
    }
}

pub fn normalize_citations(record: &CitationRecord, baselines: &BaselineIndex) -> Result<NormalizedScore, ImpactError> {
    let baseline = baselines
        .get(record.year, &record.domain)
        .ok_or_else(|| ImpactError::MissingBaseline {
            doc_id: record.doc_id.clone(),
            year: record.year,
            domain: record.domain.clone(),
        })?;
    let nc = if baseline.adc == 0.0 {
        if record.total_citations > 0 {
            return Err(ImpactError::ZeroBaselineNonzeroCitations {
                doc_id: record.doc_id.clone(),
                year: record.year,
                domain: record.domain.clone(),
                citations: record.total_citations,
            });
        }
        0.0
    } else {
        record.total_citations as f64 / baseline.adc
    };
    Ok(NormalizedScore {
        doc_id: record.doc_id.clone(),
        nc,
        group: None,
    })
}

pub fn normalize_all(records: &[CitationRecord], baselines: &BaselineIndex) -> Result<Vec<NormalizedScore>, ImpactError> {
    records.iter().map(|r| normalize_citations(r, baselines)).collect()
}

/// Group sizes (high, medium, low) for `n` ranked papers.
pub fn group_sizes(n: usize) -> (usize, usize, usize) {
    let high = n / 100;
    let top_ten = n / 10;
    (high, top_ten - high, n - top_ten)
}

/// Ranks scores by descending NC (ties by ascending doc_id) and assigns
/// groups. The output is in rank order.
pub fn stratify(scores: Vec<NormalizedScore>) -> Vec<NormalizedScore> {
    let mut scores = scores;
    scores.sort_by(|a, b| b.nc.total_cmp(&a.nc).then_with(|| a.doc_id.cmp(&b.doc_id)));
    let (high, medium, _) = group_sizes(scores.len());
    if high == 0 && !scores.is_empty() {
        log::warn!("{} scores: high-impact group is empty (fewer than 100 papers)", scores.len());
    }
    for (rank, s) in scores.iter_mut().enumerate() {
        s.group = Some(if rank < high {
            ImpactGroup::High
        } else if rank < high + medium {
            ImpactGroup::Medium
        } else {
            ImpactGroup::Low
        });
    }
    scores
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, year: i32, domain: &str, c: u64) -> CitationRecord {
        CitationRecord {
            doc_id: id.into(),
            year,
            domain: domain.into(),
            total_citations: c,
        }
    }

    fn unscored(n: usize) -> Vec<NormalizedScore> {
        (0..n)
            .map(|i| NormalizedScore {
                doc_id: format!("d{i:05}"),
                nc: ((i * 7919) % 1000) as f64 / 100.0,
                group: None,
            })
            .collect()
    }

    fn counts(scores: &[NormalizedScore]) -> (usize, usize, usize) {
        let c = |g| scores.iter().filter(|s| s.group == Some(g)).count();
        (c(ImpactGroup::High), c(ImpactGroup::Medium), c(ImpactGroup::Low))
    }

    #[test]
    fn baselines() {
        let b = compute_baselines(&[rec("a", 2010, "Ecology", 4), rec("b", 2010, "Ecology", 6)]);
        assert_eq!(b, vec![Baseline { year: 2010, domain: "Ecology".into(), adc: 5.0, n: 2 }]);
        let b = compute_baselines(&[rec("a", 2011, "Cancer", 0)]);
        assert_eq!((b[0].adc, b[0].n), (0.0, 1));
        let cell: Vec<_> = [1, 2, 3, 10].iter().enumerate().map(|(i, c)| rec(&i.to_string(), 2012, "X", *c)).collect();
        assert_eq!(compute_baselines(&cell)[0].adc, 4.0);
    }

    #[test]
    fn normalization() {
        let idx = BaselineIndex::new([Baseline { year: 2010, domain: "A".into(), adc: 5.0, n: 4 }]).unwrap();
        assert_eq!(normalize_citations(&rec("x", 2010, "A", 10), &idx).unwrap().nc, 2.0);
        assert_eq!(normalize_citations(&rec("x", 2010, "A", 0), &idx).unwrap().nc, 0.0);
        assert!(matches!(
            normalize_citations(&rec("x", 2011, "A", 1), &idx),
            Err(ImpactError::MissingBaseline { .. })
        ));
        // A cell with mean 1.0 lets a single paper reach the top of the
        // reported magnitudes.
        let idx1 = BaselineIndex::new([Baseline { year: 2010, domain: "P".into(), adc: 1.0, n: 100 }]).unwrap();
        assert_eq!(normalize_citations(&rec("x", 2010, "P", 19), &idx1).unwrap().nc, 19.0);
    }

    #[test]
    fn zero_baseline() {
        let idx = BaselineIndex::new([Baseline { year: 2010, domain: "A".into(), adc: 0.0, n: 3 }]).unwrap();
        assert_eq!(normalize_citations(&rec("x", 2010, "A", 0), &idx).unwrap().nc, 0.0);
        assert!(matches!(
            normalize_citations(&rec("x", 2010, "A", 2), &idx),
            Err(ImpactError::ZeroBaselineNonzeroCitations { citations: 2, .. })
        ));
    }

    #[test]
    fn invalid_baselines() {
        let b = |adc, n| Baseline { year: 2000, domain: "A".into(), adc, n };
        assert!(BaselineIndex::new([b(-1.0, 1)]).is_err());
        assert!(BaselineIndex::new([b(1.0, 0)]).is_err());
        assert!(BaselineIndex::new([b(f64::NAN, 1)]).is_err());
        assert!(BaselineIndex::new([b(1.0, 1), b(2.0, 1)]).is_err());
    }

    #[test]
    fn stratify_sizes() {
        assert_eq!(counts(&stratify(unscored(1797))), (17, 162, 1618));
        assert_eq!(counts(&stratify(unscored(100))), (1, 9, 90));
        assert_eq!(counts(&stratify(unscored(50))), (0, 5, 45));
        assert_eq!(group_sizes(0), (0, 0, 0));
    }

    #[test]
    fn ties_broken_by_doc_id() {
        let scores: Vec<_> = ["c", "a", "b"]
            .iter()
            .map(|id| NormalizedScore { doc_id: id.to_string(), nc: 1.0, group: None })
            .collect();
        let ranked = stratify(scores);
        let ids: Vec<_> = ranked.iter().map(|s| s.doc_id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b", "c"]);
    }

    #[test]
    fn group_names_parse() {
        for g in ImpactGroup::ALL {
            assert_eq!(g.as_str().parse::<ImpactGroup>().unwrap(), g);
        }
        assert_eq!("G2".parse::<ImpactGroup>().unwrap(), ImpactGroup::Medium);
        assert!("Top".parse::<ImpactGroup>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_records() -> impl Strategy<Value = Vec<CitationRecord>> {
            proptest::collection::vec((2000..2004i32, 0..3usize, 0..200u64), 1..300).prop_map(|v| {
                v.into_iter()
                    .enumerate()
                    .map(|(i, (y, d, c))| rec(&format!("p{i}"), y, ["A", "B", "C"][d], c))
                    .collect()
            })
        }

        proptest! {
            #[test]
            fn cell_mean_is_one(records in arb_records()) {
                let idx = BaselineIndex::new(compute_baselines(&records)).unwrap();
                let scores = normalize_all(&records, &idx).unwrap();
                let mut cells: BTreeMap<(i32, &str), (f64, usize)> = BTreeMap::new();
                for (r, s) in records.iter().zip(&scores) {
                    let e = cells.entry((r.year, r.domain.as_str())).or_default();
                    e.0 += s.nc;
                    e.1 += 1;
                }
                for ((y, d), (sum, n)) in cells {
                    let adc = idx.get(y, d).unwrap().adc;
                    if adc > 0.0 {
                        prop_assert!((sum / n as f64 - 1.0).abs() < 1e-9);
                    } else {
                        prop_assert_eq!(sum, 0.0);
                    }
                }
            }

            #[test]
            fn scaling_leaves_nc_unchanged(records in arb_records(), k in 1..50u64) {
                let scaled: Vec<_> = records.iter().map(|r| CitationRecord { total_citations: r.total_citations * k, ..r.clone() }).collect();
                let a = normalize_all(&records, &BaselineIndex::new(compute_baselines(&records)).unwrap()).unwrap();
                let b = normalize_all(&scaled, &BaselineIndex::new(compute_baselines(&scaled)).unwrap()).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x.nc - y.nc).abs() <= 1e-12 * x.nc.max(1.0));
                }
            }

            #[test]
            fn strata_are_ordered(ncs in proptest::collection::vec(0..20u32, 1..400)) {
                let scores: Vec<_> = ncs.iter().enumerate().map(|(i, v)| NormalizedScore { doc_id: format!("{i:04}"), nc: *v as f64 / 4.0, group: None }).collect();
                let n = scores.len();
                let ranked = stratify(scores.clone());
                prop_assert_eq!(&ranked, &stratify(scores.into_iter().rev().collect()));
                let (h, m, l) = counts(&ranked);
                prop_assert_eq!(h + m + l, n);
                prop_assert_eq!((h, m, l), group_sizes(n));
                let min = |g| ranked.iter().filter(|s| s.group == Some(g)).map(|s| s.nc).fold(f64::INFINITY, f64::min);
                let max = |g| ranked.iter().filter(|s| s.group == Some(g)).map(|s| s.nc).fold(f64::NEG_INFINITY, f64::max);
                if h > 0 && m > 0 { prop_assert!(min(ImpactGroup::High) >= max(ImpactGroup::Medium)); }
                if m > 0 && l > 0 { prop_assert!(min(ImpactGroup::Medium) >= max(ImpactGroup::Low)); }
            }
        }
    }
}
