//! Least-squares fits of NC against the complexity variables.
//!
//! Six model families, each with its own coefficient per term:
//!
//! | model | response | terms |
//! |---|---|---|
//! | 1 | NC | linear, squares, pairwise products |
//! | 2 | NC | linear, squares |
//! | 3 | ln NC | linear, squares, pairwise products |
//! | 4 | ln NC | linear, squares |
//! | 5 | exp NC | linear |
//! | 6 | ln NC | linear |
//!
//! Design columns are ordered: intercept, `x1..x12`, `x1^2..x12^2`, then
//! `xi*xj` for `i < j` in lexicographic order. Predictors are z-scored over
//! the rows being fitted before expansion; this changes the coefficients'
//! scale but not the fitted values or R².

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::impact::{ImpactGroup, NormalizedScore};
use crate::metrics::{ComplexityProfile, VARIABLE_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModelId(u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terms {
    Linear,
    Quadratic,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    Identity,
    Log,
    Exp,
}

impl ModelId {
    pub const ALL: [ModelId; 6] = [ModelId(1), ModelId(2), ModelId(3), ModelId(4), ModelId(5), ModelId(6)];

    pub fn new(id: u8) -> Result<Self, StatsError> {
        if (1..=6).contains(&id) {
            Ok(Self(id))
        } else {
            Err(StatsError::InvalidArgument(format!("model {id} not in 1..=6")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn terms(self) -> Terms {
        match self.0 {
            1 | 3 => Terms::Full,
            2 | 4 => Terms::Quadratic,
            _ => Terms::Linear,
        }
    }

    pub fn response(self) -> Response {
        match self.0 {
            1 | 2 => Response::Identity,
            5 => Response::Exp,
            _ => Response::Log,
        }
    }

    pub fn column_count(self) -> usize {
        let p = VARIABLE_COUNT;
        match self.terms() {
            Terms::Linear => 1 + p,
            Terms::Quadratic => 1 + 2 * p,
            Terms::Full => 1 + 2 * p + p * (p - 1) / 2,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub matrix: DMatrix<f64>,
    pub labels: Vec<String>,
}

fn labels(terms: Terms) -> Vec<String> {
    let p = VARIABLE_COUNT;
    let mut out = vec!["intercept".to_owned()];
    out.extend((1..=p).map(|i| format!("x{i}")));
    if terms != Terms::Linear {
        out.extend((1..=p).map(|i| format!("x{i}^2")));
    }
    if terms == Terms::Full {
        for i in 1..=p {
            for j in i + 1..=p {
                out.push(format!("x{i}*x{j}"));
            }
        }
    }
    out
}

fn expand_row(x: &[f64; VARIABLE_COUNT], terms: Terms, out: &mut Vec<f64>) {
    out.push(1.0);
    out.extend_from_slice(x);
    if terms != Terms::Linear {
        out.extend(x.iter().map(|v| v * v));
    }
    if terms == Terms::Full {
        for i in 0..VARIABLE_COUNT {
            for j in i + 1..VARIABLE_COUNT {
                out.push(x[i] * x[j]);
            }
        }
    }
}

/// Expands raw predictor rows into a model's design matrix.
pub fn design_matrix(rows: &[[f64; VARIABLE_COUNT]], model: ModelId) -> Result<DesignMatrix, StatsError> {
    if rows.is_empty() {
        return Err(StatsError::NoRowsRemaining);
    }
    let terms = model.terms();
    let cols = model.column_count();
    let mut data = Vec::with_capacity(rows.len() * cols);
    for row in rows {
        expand_row(row, terms, &mut data);
    }
    Ok(DesignMatrix {
        matrix: DMatrix::from_row_slice(rows.len(), cols, &data),
        labels: labels(terms),
    })
}

/// Z-scores each predictor column (sample sd); constant columns become 0.
fn standardize(rows: &[[f64; VARIABLE_COUNT]]) -> Vec<[f64; VARIABLE_COUNT]> {
    let n = rows.len() as f64;
    let mut out = rows.to_vec();
    for j in 0..VARIABLE_COUNT {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = if rows.len() > 1 {
            rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let sd = var.sqrt();
        for r in &mut out {
            r[j] = if sd > 0.0 { (r[j] - mean) / sd } else { 0.0 };
        }
    }
    out
}

/// Coefficient of determination, `1 - SS_res / SS_tot`.
pub fn r_squared(y: &[f64], yhat: &[f64]) -> Result<f64, StatsError> {
    if y.len() != yhat.len() {
        return Err(StatsError::LengthMismatch(y.len(), yhat.len()));
    }
    if y.len() < 2 {
        return Err(StatsError::InvalidArgument("need at least two observations".into()));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    // A constant response can leave rounding residue in SS_tot.
    if ss_tot == 0.0 || y.iter().all(|v| *v == y[0]) {
        return Err(StatsError::DegenerateResponse);
    }
    let ss_res: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitStatus {
    Estimable,
    NonEstimable,
}

/// Fitted coefficients, on the standardized predictor scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub intercept: f64,
    pub linear: Vec<f64>,
    pub squares: Vec<f64>,
    /// Products `xi*xj`, `i < j`, lexicographic.
    pub products: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: ModelId,
    pub status: FitStatus,
    pub coefficients: Option<Coefficients>,
    /// `None` exactly when the fit is not estimable.
    pub r_squared: Option<f64>,
    pub rank: usize,
    pub n_used: usize,
    pub n_dropped_zero_nc: usize,
    pub n_dropped_absent: usize,
    /// The response had zero variance; R² is reported as 0.
    pub degenerate_response: bool,
}

impl ModelFit {
    pub fn n_dropped(&self) -> usize {
        self.n_dropped_zero_nc + self.n_dropped_absent
    }

    /// R² with three decimals, or an en dash when not estimable.
    pub fn r_squared_display(&self) -> String {
        match self.r_squared {
            Some(r) => format!("{r:.3}"),
            None => "\u{2013}".to_owned(),
        }
    }
}

/// Fits one model to complete predictor rows and raw NC values.
pub fn fit_rows(rows: &[[f64; VARIABLE_COUNT]], nc: &[f64], model: ModelId) -> Result<ModelFit, StatsError> {
    if rows.len() != nc.len() {
        return Err(StatsError::LengthMismatch(rows.len(), nc.len()));
    }
    let mut kept_rows = Vec::with_capacity(rows.len());
    let mut y = Vec::with_capacity(rows.len());
    let mut dropped_zero = 0;
    for (row, &v) in rows.iter().zip(nc) {
        if !v.is_finite() || v < 0.0 {
            return Err(StatsError::NonFinite);
        }
        let t = match model.response() {
            Response::Identity => v,
            Response::Log if v == 0.0 => {
                dropped_zero += 1;
                continue;
            }
            Response::Log => v.ln(),
            Response::Exp => v.exp(),
        };
        if !t.is_finite() {
            return Err(StatsError::NonFinite);
        }
        kept_rows.push(*row);
        y.push(t);
    }
    if kept_rows.is_empty() {
        return Err(StatsError::NoRowsRemaining);
    }

    let cols = model.column_count();
    let mut fit = ModelFit {
        model,
        status: FitStatus::NonEstimable,
        coefficients: None,
        r_squared: None,
        rank: 0,
        n_used: kept_rows.len(),
        n_dropped_zero_nc: dropped_zero,
        n_dropped_absent: 0,
        degenerate_response: false,
    };

    let design = design_matrix(&standardize(&kept_rows), model)?;
    let x = design.matrix;
    let svd = x.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let tol = f64::EPSILON * x.nrows().max(x.ncols()) as f64 * sigma_max;
    fit.rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    if kept_rows.len() < cols || fit.rank < cols {
        return Ok(fit);
    }

    let yv = DVector::from_vec(y.clone());
    let beta = svd
        .solve(&yv, tol)
        .map_err(|e| StatsError::InvalidArgument(e.to_owned()))?;
    let yhat = &x * &beta;
    let r2 = match r_squared(&y, yhat.as_slice()) {
        Ok(r) => r.clamp(0.0, 1.0),
        Err(StatsError::DegenerateResponse) => {
            log::warn!("{model}: response is constant over {} rows, R² set to 0", y.len());
            fit.degenerate_response = true;
            0.0
        }
        Err(e) => return Err(e),
    };

    let b = beta.as_slice();
    let p = VARIABLE_COUNT;
    fit.coefficients = Some(Coefficients {
        intercept: b[0],
        linear: b[1..1 + p].to_vec(),
        squares: if model.terms() == Terms::Linear { Vec::new() } else { b[1 + p..1 + 2 * p].to_vec() },
        products: if model.terms() == Terms::Full { b[1 + 2 * p..].to_vec() } else { Vec::new() },
    });
    fit.status = FitStatus::Estimable;
    fit.r_squared = Some(r2);
    Ok(fit)
}

/// Joins profiles to scores on `doc_id` and fits one model. When `cohort`
/// is given only documents in that impact group are used. Profiles with an
/// absent sophistication value are dropped and counted.
pub fn fit_model(
    profiles: &[ComplexityProfile],
    scores: &[NormalizedScore],
    model: ModelId,
    cohort: Option<ImpactGroup>,
) -> Result<ModelFit, StatsError> {
    let by_id: HashMap<&str, &NormalizedScore> = scores.iter().map(|s| (s.doc_id.as_str(), s)).collect();
    let mut rows = Vec::new();
    let mut nc = Vec::new();
    let mut absent = 0;
    for p in profiles {
        let score = by_id
            .get(p.doc_id.as_str())
            .ok_or_else(|| StatsError::JoinMismatch(p.doc_id.clone()))?;
        if cohort.is_some() && score.group != cohort {
            continue;
        }
        match p.complete() {
            Some(values) => {
                rows.push(values);
                nc.push(score.nc);
            }
            None => absent += 1,
        }
    }
    let mut fit = fit_rows(&rows, &nc, model)?;
    fit.n_dropped_absent = absent;
    Ok(fit)
}
