//! Group comparison tables: KS tests per variable and group pair, ECDF
//! points, bootstrap intervals per variable and group, and the regression
//! grid over models and cohorts.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::impact::{ImpactGroup, NormalizedScore};
use crate::metrics::{ComplexityProfile, VARIABLE_COUNT, VARIABLE_NAMES};
use crate::report::{fmt_f64, write_csv, Metadata};
use crate::stats::{bootstrap_mean_ci, ecdf_steps, fit_model, ks_two_sample, FitStatus, ModelFit, ModelId, StatsError};

/// Status cell for rows that could not be computed.
pub const GROUP_EMPTY: &str = "GroupEmpty";

/// Values of one variable split by impact group, with the number of group
/// members whose value was absent.
#[derive(Debug, Clone, Default)]
pub struct GroupedVariable {
    pub values: [Vec<f64>; 3],
    pub excluded: [usize; 3],
}

/// Splits every variable by impact group. Profiles without a grouped score
/// are skipped; a profile with no score at all is a join error.
pub fn group_values(
    profiles: &[ComplexityProfile],
    scores: &[NormalizedScore],
) -> Result<Vec<GroupedVariable>, StatsError> {
    let groups: HashMap<&str, Option<ImpactGroup>> = scores.iter().map(|s| (s.doc_id.as_str(), s.group)).collect();
    let mut out = vec![GroupedVariable::default(); VARIABLE_COUNT];
    for p in profiles {
        let group = groups
            .get(p.doc_id.as_str())
            .ok_or_else(|| StatsError::JoinMismatch(p.doc_id.clone()))?;
        let Some(g) = group else { continue };
        for (var, value) in out.iter_mut().zip(p.values()) {
            match value {
                Some(v) => var.values[g.index()].push(v),
                None => var.excluded[g.index()] += 1,
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsRow {
    pub variable: usize,
    pub pair: (ImpactGroup, ImpactGroup),
    pub n1: usize,
    pub n2: usize,
    pub excluded: usize,
    pub d: Option<f64>,
    pub p: Option<f64>,
    pub stars: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfRow {
    pub variable: usize,
    pub group: ImpactGroup,
    pub x: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub variable: usize,
    pub group: ImpactGroup,
    pub n: usize,
    pub excluded: usize,
    pub point: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Default)]
pub struct Comparison {
    pub ks: Vec<KsRow>,
    pub cdf: Vec<CdfRow>,
    pub estimates: Vec<EstimateRow>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for one (variable, group) bootstrap, derived from the run seed so
/// results do not depend on scheduling order.
pub fn subseed(root: u64, variable: usize, group: ImpactGroup) -> u64 {
    splitmix64(splitmix64(root ^ splitmix64(variable as u64)) ^ group.index() as u64)
}

/// Runs the full comparison battery.
pub fn compare_groups(
    profiles: &[ComplexityProfile],
    scores: &[NormalizedScore],
    iterations: usize,
    level: f64,
    seed: u64,
) -> Result<Comparison, StatsError> {
    let grouped = group_values(profiles, scores)?;
    for g in ImpactGroup::ALL {
        if grouped[0].values[g.index()].is_empty() && grouped[0].excluded[g.index()] == 0 {
            log::warn!("impact group {g} is empty; its comparisons are skipped");
        }
    }

    let mut out = Comparison::default();
    for (v, var) in grouped.iter().enumerate() {
        for (a, b) in ImpactGroup::PAIRS {
            let (xa, xb) = (&var.values[a.index()], &var.values[b.index()]);
            let excluded = var.excluded[a.index()] + var.excluded[b.index()];
            let mut row = KsRow { variable: v, pair: (a, b), n1: xa.len(), n2: xb.len(), excluded, d: None, p: None, stars: 0 };
            if !xa.is_empty() && !xb.is_empty() {
                let r = ks_two_sample(xa, xb)?;
                row.d = Some(r.d_statistic);
                row.p = Some(r.p_value);
                row.stars = r.stars;
            }
            out.ks.push(row);
        }
        for g in ImpactGroup::ALL {
            let sample = &var.values[g.index()];
            if sample.is_empty() {
                continue;
            }
            out.cdf.extend(ecdf_steps(sample)?.into_iter().map(|(x, f)| CdfRow { variable: v, group: g, x, f }));
        }
    }

    let jobs: Vec<(usize, ImpactGroup)> = (0..VARIABLE_COUNT)
        .flat_map(|v| ImpactGroup::ALL.map(|g| (v, g)))
        .collect();
    out.estimates = jobs
        .into_par_iter()
        .map(|(v, g)| {
            let sample = &grouped[v].values[g.index()];
            let seed = subseed(seed, v, g);
            let mut row = EstimateRow {
                variable: v,
                group: g,
                n: sample.len(),
                excluded: grouped[v].excluded[g.index()],
                point: None,
                ci_low: None,
                ci_high: None,
                seed,
            };
            if !sample.is_empty() {
                let e = bootstrap_mean_ci(sample, iterations, level, seed)?;
                row.point = Some(e.point);
                row.ci_low = Some(e.ci_low);
                row.ci_high = Some(e.ci_high);
            }
            Ok(row)
        })
        .collect::<Result<_, StatsError>>()?;
    Ok(out)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn status(ok: bool) -> String {
    if ok { "ok" } else { GROUP_EMPTY }.to_owned()
}

pub fn comparison_csv(meta: &Metadata, rows: &[KsRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                VARIABLE_NAMES[r.variable].to_owned(),
                format!("{}-{}", r.pair.0, r.pair.1),
                r.n1.to_string(),
                r.n2.to_string(),
                r.excluded.to_string(),
                opt(r.d),
                opt(r.p),
                crate::stats::ks::star_string(r.stars).to_owned(),
                status(r.d.is_some()),
            ]
        })
        .collect();
    write_csv(meta, &["variable", "group_pair", "n1", "n2", "excluded", "D", "p", "stars", "status"], &body)
}

pub fn cdf_csv(meta: &Metadata, rows: &[CdfRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![VARIABLE_NAMES[r.variable].to_owned(), r.group.to_string(), fmt_f64(r.x), fmt_f64(r.f)])
        .collect();
    write_csv(meta, &["variable", "group", "x", "F"], &body)
}

pub fn estimates_csv(meta: &Metadata, rows: &[EstimateRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                VARIABLE_NAMES[r.variable].to_owned(),
                r.group.to_string(),
                r.n.to_string(),
                r.excluded.to_string(),
                opt(r.point),
                opt(r.ci_low),
                opt(r.ci_high),
                status(r.point.is_some()),
            ]
        })
        .collect();
    write_csv(meta, &["variable", "group", "n", "excluded", "point", "ci_low", "ci_high", "status"], &body)
}

/// Cohort label used in the regression table.
pub fn cohort_label(cohort: Option<ImpactGroup>) -> &'static str {
    match cohort {
        None => "all",
        Some(ImpactGroup::High) => "HS",
        Some(ImpactGroup::Medium) => "MS",
        Some(ImpactGroup::Low) => "LS",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    pub cohort: Option<ImpactGroup>,
    pub fit: ModelFit,
}

/// Fits models 1..6 to the whole sample and to each impact group. A cohort
/// too small to leave any row yields a non-estimable row rather than an
/// error.
pub fn regression_grid(profiles: &[ComplexityProfile], scores: &[NormalizedScore]) -> Result<Vec<RegressionRow>, StatsError> {
    let cohorts = [None, Some(ImpactGroup::High), Some(ImpactGroup::Medium), Some(ImpactGroup::Low)];
    let jobs: Vec<(ModelId, Option<ImpactGroup>)> =
        ModelId::ALL.iter().flat_map(|&m| cohorts.map(|c| (m, c))).collect();
    jobs.into_par_iter()
        .map(|(model, cohort)| {
            let fit = match fit_model(profiles, scores, model, cohort) {
                Ok(fit) => fit,
                Err(StatsError::NoRowsRemaining) => ModelFit {
                    model,
                    status: FitStatus::NonEstimable,
                    coefficients: None,
                    r_squared: None,
                    rank: 0,
                    n_used: 0,
                    n_dropped_zero_nc: 0,
                    n_dropped_absent: 0,
                    degenerate_response: false,
                },
                Err(e) => return Err(e),
            };
            Ok(RegressionRow { cohort, fit })
        })
        .collect()
}

pub fn regression_csv(meta: &Metadata, rows: &[RegressionRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.fit.model.to_string(),
                cohort_label(r.cohort).to_owned(),
                r.fit.r_squared.map(fmt_f64).unwrap_or_else(|| "\u{2013}".to_owned()),
                r.fit.n_used.to_string(),
                r.fit.n_dropped().to_string(),
            ]
        })
        .collect();
    write_csv(meta, &["model", "cohort", "r_squared", "n_used", "n_dropped"], &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(id: &str, x1: f64, x5: Option<f64>) -> ComplexityProfile {
        let mut p = ComplexityProfile::from_values(id, std::array::from_fn(|i| Some(x1 + i as f64))).unwrap();
        p.noun_length = x5;
        p
    }

    fn score(id: &str, nc: f64, g: Option<ImpactGroup>) -> NormalizedScore {
        NormalizedScore { doc_id: id.into(), nc, group: g }
    }

    #[test]
    fn empty_group_rows_are_flagged() {
        let profiles = vec![profile("a", 1.0, Some(3.0)), profile("b", 2.0, None), profile("c", 3.0, Some(4.0))];
        let scores = vec![
            score("a", 0.5, Some(ImpactGroup::Low)),
            score("b", 0.6, Some(ImpactGroup::Low)),
            score("c", 3.0, Some(ImpactGroup::Medium)),
        ];
        let c = compare_groups(&profiles, &scores, 200, 0.95, 1).unwrap();
        assert_eq!(c.ks.len(), 36);
        assert_eq!(c.estimates.len(), 36);
        let hm = &c.ks[0];
        assert_eq!((hm.n1, hm.n2, hm.d), (0, 1, None));
        let ml_x5 = &c.ks[4 * 3 + 2];
        assert_eq!((ml_x5.n1, ml_x5.n2, ml_x5.excluded), (1, 1, 1));
        assert!(ml_x5.d.is_some());
        let csv = comparison_csv(&Metadata::new(), &c.ks);
        assert!(csv.contains("x1,High-Medium,0,1,0,,,,GroupEmpty"), "{csv}");
        assert!(c.estimates.iter().filter(|e| e.group == ImpactGroup::High).all(|e| e.point.is_none()));
    }

    #[test]
    fn missing_score_is_a_join_error() {
        let r = compare_groups(&[profile("a", 1.0, None)], &[], 10, 0.95, 1);
        assert!(matches!(r, Err(StatsError::JoinMismatch(_))));
    }

    #[test]
    fn subseeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..12)
            .flat_map(|v| ImpactGroup::ALL.map(|g| subseed(42, v, g)))
            .collect();
        assert_eq!(seeds.len(), 36);
        assert_eq!(subseed(42, 3, ImpactGroup::Low), subseed(42, 3, ImpactGroup::Low));
    }

    #[test]
    fn regression_grid_has_24_rows() {
        let profiles: Vec<_> = (0..20).map(|i| profile(&format!("d{i}"), i as f64, Some(1.0))).collect();
        let scores: Vec<_> = (0..20)
            .map(|i| score(&format!("d{i}"), i as f64 / 10.0, Some(if i < 2 { ImpactGroup::High } else { ImpactGroup::Low })))
            .collect();
        let rows = regression_grid(&profiles, &scores).unwrap();
        assert_eq!(rows.len(), 24);
        assert_eq!(cohort_label(rows[1].cohort), "HS");
        let ms = &rows[2];
        assert_eq!((ms.fit.status, ms.fit.n_used), (FitStatus::NonEstimable, 0));
        let csv = regression_csv(&Metadata::new(), &rows);
        assert_eq!(csv.lines().count(), 25);
        assert!(csv.contains("M1,MS,\u{2013},0,0"), "{csv}");
    }
}
