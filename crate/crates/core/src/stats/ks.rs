//! Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.

use serde::{Deserialize, Serialize};

use super::{check_finite, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d_statistic: f64,
    pub p_value: f64,
    pub stars: u8,
    pub n1: usize,
    pub n2: usize,
}

impl KsResult {
    pub fn star_string(&self) -> &'static str {
        star_string(self.stars)
    }
}

/// Significance stars: 3 at p <= 0.001, 2 at p <= 0.01, 1 at p <= 0.05.
pub fn stars(p: f64) -> u8 {
    if p <= 0.001 {
        3
    } else if p <= 0.01 {
        2
    } else if p <= 0.05 {
        1
    } else {
        0
    }
}

pub fn star_string(stars: u8) -> &'static str {
    match stars {
        0 => "",
        1 => "*",
        2 => "**",
        _ => "***",
    }
}

/// Largest absolute ECDF difference, evaluated at every observed value.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    check_finite(a)?;
    check_finite(b)?;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    // Once one sample is exhausted the gap can only shrink.
    Ok(d)
}

const TERM_CUTOFF: f64 = 1e-12;
// Below this λ the alternating series needs many terms; the Jacobi theta
// form of the same function converges in one or two.
const SMALL_LAMBDA: f64 = 0.2;

/// Asymptotic survival function of the Kolmogorov distribution,
/// `2 Σ_{k>=1} (-1)^(k-1) exp(-2 k² λ²)`, clamped to `[0, 1]`.
pub fn ks_asymptotic_p(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < SMALL_LAMBDA {
        // 1 - sqrt(2π)/λ Σ exp(-(2k-1)² π² / (8 λ²))
        let mut cdf = 0.0;
        let mut k = 1.0f64;
        loop {
            let term = (-(2.0 * k - 1.0).powi(2) * std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
            cdf += term;
            if term < TERM_CUTOFF {
                break;
            }
            k += 1.0;
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * cdf;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut k = 1.0f64;
    loop {
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += sign * term;
        if term < TERM_CUTOFF {
            break;
        }
        sign = -sign;
        k += 1.0;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, StatsError> {
    let d = ks_statistic(a, b)?;
    let (n1, n2) = (a.len(), b.len());
    let ne = (n1 as f64 * n2 as f64) / (n1 + n2) as f64;
    let p = ks_asymptotic_p(d * ne.sqrt());
    Ok(KsResult {
        d_statistic: d,
        p_value: p,
        stars: stars(p),
        n1,
        n2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute force: evaluate both ECDFs at every pooled value.
    fn brute_d(a: &[f64], b: &[f64]) -> f64 {
        let f = |s: &[f64], x: f64| s.iter().filter(|v| **v <= x).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b)
            .map(|&x| (f(a, x) - f(b, x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identical_samples() {
        let r = ks_two_sample(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(r.d_statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!(r.stars, 0);
    }

    #[test]
    fn disjoint_samples() {
        assert_eq!(ks_statistic(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
    }

    #[test]
    fn interleaved_samples() {
        // Steps at 1..6 give |F_a - F_b| = 1/3, 0, 1/3, 0, 1/3, 0.
        let d = ks_statistic(&[1.0, 3.0, 5.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d, brute_d(&[1.0, 3.0, 5.0], &[2.0, 4.0, 6.0]));
    }

    #[test]
    fn ties_across_samples() {
        let a = [1.0, 1.0, 2.0, 2.0];
        let b = [1.0, 2.0, 2.0, 3.0];
        assert_eq!(ks_statistic(&a, &b).unwrap(), brute_d(&a, &b));
    }

    #[test]
    fn empty_or_nan() {
        assert_eq!(ks_two_sample(&[], &[1.0]), Err(StatsError::EmptySample));
        assert_eq!(ks_two_sample(&[1.0], &[f64::INFINITY]), Err(StatsError::NonFinite));
    }

    #[test]
    fn star_levels() {
        assert_eq!(stars(0.0005), 3);
        assert_eq!(stars(0.001), 3);
        assert_eq!(stars(0.005), 2);
        assert_eq!(stars(0.01), 2);
        assert_eq!(stars(0.05), 1);
        assert_eq!(stars(0.0500001), 0);
        assert_eq!(star_string(2), "**");
    }

    #[test]
    fn asymptotic_reference_values() {
        // Q(1.36) ≈ 0.0495 and Q(1.63) ≈ 0.0098 are the usual 5% / 1% critical points.
        assert!((ks_asymptotic_p(1.36) - 0.0495).abs() < 5e-4);
        assert!((ks_asymptotic_p(1.63) - 0.0098).abs() < 5e-4);
        assert!((ks_asymptotic_p(0.5) - 0.9639).abs() < 5e-4);
    }

    #[test]
    fn both_forms_agree_near_switch() {
        // Evaluate the plain alternating series below the switch point.
        let series = |lambda: f64| {
            let mut s = 0.0;
            for k in 1..2000 {
                let k = k as f64;
                s += if k as u64 % 2 == 1 { 1.0 } else { -1.0 } * (-2.0 * k * k * lambda * lambda).exp();
            }
            2.0 * s
        };
        for lambda in [0.15, 0.19, 0.199] {
            assert!((ks_asymptotic_p(lambda) - series(lambda).clamp(0.0, 1.0)).abs() < 1e-9);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn matches_brute_force_and_is_symmetric(
                a in proptest::collection::vec(0..10i32, 1..12),
                b in proptest::collection::vec(0..10i32, 1..12),
            ) {
                let a: Vec<f64> = a.into_iter().map(f64::from).collect();
                let b: Vec<f64> = b.into_iter().map(f64::from).collect();
                let ab = ks_two_sample(&a, &b).unwrap();
                let ba = ks_two_sample(&b, &a).unwrap();
                prop_assert_eq!(ab.d_statistic, brute_d(&a, &b));
                prop_assert_eq!(ab.d_statistic, ba.d_statistic);
                prop_assert_eq!(ab.p_value, ba.p_value);
                prop_assert!((0.0..=1.0).contains(&ab.d_statistic));
                prop_assert!((0.0..=1.0).contains(&ab.p_value));
            }

            #[test]
            fn p_is_monotone_in_lambda(x in 0.0..4.0f64, dx in 0.0..1.0f64) {
                prop_assert!(ks_asymptotic_p(x + dx) <= ks_asymptotic_p(x) + 1e-12);
            }
        }
    }
}
