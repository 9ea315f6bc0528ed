use super::{check_finite, StatsError};

/// Fraction of `sample` values that are `<= x`.
pub fn ecdf(sample: &[f64], x: f64) -> Result<f64, StatsError> {
    check_finite(sample)?;
    let below = sample.iter().filter(|v| **v <= x).count();
    Ok(below as f64 / sample.len() as f64)
}

/// A sorted sample, for repeated ECDF evaluation.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(sample: &[f64]) -> Result<Self, StatsError> {
        check_finite(sample)?;
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    /// `(x, F(x))` at every distinct sample value, ascending.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = f,
                _ => out.push((x, f)),
            }
        }
        out
    }
}

/// Step points of the ECDF of `sample`.
pub fn ecdf_steps(sample: &[f64]) -> Result<Vec<(f64, f64)>, StatsError> {
    Ok(Ecdf::new(sample)?.steps())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_values() {
        assert_eq!(ecdf(&[1.0, 2.0, 3.0], 2.0).unwrap(), 2.0 / 3.0);
        assert_eq!(ecdf(&[1.0, 2.0, 3.0], 0.5).unwrap(), 0.0);
        assert_eq!(ecdf(&[1.0, 2.0, 3.0], 3.0).unwrap(), 1.0);
        assert_eq!(ecdf(&[1.0, 2.0, 3.0], 9.0).unwrap(), 1.0);
        assert_eq!(ecdf(&[1.0, 1.0, 2.0], 1.0).unwrap(), 2.0 / 3.0);
        assert_eq!(ecdf(&[], 1.0), Err(StatsError::EmptySample));
        assert_eq!(ecdf(&[f64::NAN], 1.0), Err(StatsError::NonFinite));
    }

    #[test]
    fn sorted_matches_direct() {
        let sample = [3.0, 1.0, 1.0, 2.0, 5.0, 2.0];
        let e = Ecdf::new(&sample).unwrap();
        for x in [0.0, 1.0, 1.5, 2.0, 4.9, 5.0, 6.0] {
            assert_eq!(e.eval(x), ecdf(&sample, x).unwrap());
        }
    }

    #[test]
    fn steps_collapse_ties() {
        let steps = ecdf_steps(&[1.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(steps, vec![(1.0, 0.5), (2.0, 0.75), (4.0, 1.0)]);
    }
}
