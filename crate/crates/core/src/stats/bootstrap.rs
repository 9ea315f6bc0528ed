//! Percentile bootstrap for the sample mean.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_finite, StatsError};

pub const DEFAULT_ITERATIONS: usize = 10_000;
pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapEstimate {
    /// Mean of the original sample.
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub iterations: usize,
    pub level: f64,
    pub seed: u64,
}

/// 1-based nearest-rank index of quantile `q` among `n` sorted values.
fn nearest_rank(q: f64, n: usize) -> usize {
    // The small slack keeps products like 0.025 * 10000 from rounding up a rank.
    let rank = (q * n as f64 - 1e-9).ceil() as usize;
    rank.clamp(1, n)
}

/// Resamples `sample` with replacement `iterations` times and returns the
/// `(1-level)/2` and `1-(1-level)/2` nearest-rank percentiles of the
/// resampled means.
pub fn bootstrap_mean_ci(sample: &[f64], iterations: usize, level: f64, seed: u64) -> Result<BootstrapEstimate, StatsError> {
    check_finite(sample)?;
    if iterations == 0 {
        return Err(StatsError::InvalidArgument("iterations must be at least 1".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidArgument(format!("level {level} not in (0, 1)")));
    }
    let n = sample.len();
    let len = u32::try_from(n).map_err(|_| StatsError::InvalidArgument("sample too large".into()))?;
    let point = sample.iter().sum::<f64>() / n as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..iterations)
        .map(|_| {
            let mut sum = 0.0;
            for _ in 0..n {
                sum += sample[rng.random_range(0..len) as usize];
            }
            sum / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);

    let tail = (1.0 - level) / 2.0;
    let ci_low = means[nearest_rank(tail, iterations) - 1];
    let ci_high = means[nearest_rank(1.0 - tail, iterations) - 1];
    Ok(BootstrapEstimate {
        point,
        ci_low,
        ci_high,
        iterations,
        level,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_has_zero_width() {
        let e = bootstrap_mean_ci(&[5.0; 4], 1000, 0.95, 7).unwrap();
        assert_eq!((e.point, e.ci_low, e.ci_high), (5.0, 5.0, 5.0));
    }

    #[test]
    fn reproducible_for_a_seed() {
        let s = [1.0, 4.0, 2.0, 8.0, 5.0, 7.0];
        let a = bootstrap_mean_ci(&s, 500, 0.9, 11).unwrap();
        assert_eq!(a, bootstrap_mean_ci(&s, 500, 0.9, 11).unwrap());
        assert_ne!(a, bootstrap_mean_ci(&s, 500, 0.9, 12).unwrap());
        assert!(a.ci_low <= a.point && a.point <= a.ci_high);
        assert_eq!((a.iterations, a.seed), (500, 11));
    }

    #[test]
    fn ranks() {
        assert_eq!(nearest_rank(0.025, 10_000), 250);
        assert_eq!(nearest_rank(0.975, 10_000), 9750);
        assert_eq!(nearest_rank(0.025, 10), 1);
        assert_eq!(nearest_rank(0.975, 10), 10);
        assert_eq!(nearest_rank(0.5, 1), 1);
    }

    #[test]
    fn bad_arguments() {
        assert_eq!(bootstrap_mean_ci(&[], 10, 0.95, 0), Err(StatsError::EmptySample));
        assert!(bootstrap_mean_ci(&[1.0], 0, 0.95, 0).is_err());
        assert!(bootstrap_mean_ci(&[1.0], 10, 1.0, 0).is_err());
    }

    #[test]
    fn single_iteration() {
        let e = bootstrap_mean_ci(&[1.0, 2.0], 1, 0.95, 3).unwrap();
        assert_eq!(e.ci_low, e.ci_high);
    }
}
