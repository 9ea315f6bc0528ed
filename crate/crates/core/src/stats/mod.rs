//! Statistical comparison battery.

pub mod bootstrap;
pub mod ecdf;
pub mod ks;
pub mod regression;

use thiserror::Error;

pub use bootstrap::{bootstrap_mean_ci, BootstrapEstimate, DEFAULT_ITERATIONS, DEFAULT_LEVEL};
pub use ecdf::{ecdf, ecdf_steps, Ecdf};
pub use ks::{ks_asymptotic_p, ks_statistic, ks_two_sample, stars, KsResult};
pub use regression::{
    design_matrix, fit_model, fit_rows, r_squared, Coefficients, DesignMatrix, FitStatus, ModelFit, ModelId,
};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("response has zero variance")]
    DegenerateResponse,
    #[error("no rows remain after exclusions")]
    NoRowsRemaining,
    #[error("document {0:?} has a profile but no score")]
    JoinMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub(crate) fn check_finite(sample: &[f64]) -> Result<(), StatsError> {
    if sample.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}
