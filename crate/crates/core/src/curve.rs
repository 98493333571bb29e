//! Log-spaced sampling grids and sampled curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `points` abscissae log-spaced on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) || points < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {points}"
            )));
        }
        Ok(GridSpec { lo, hi, points })
    }

    /// Default sampling range for a sequence with first quotient `mu1` and
    /// valid domain `[0, t_max)`.
    pub fn for_domain(mu1: f64, t_max: f64, points: usize) -> Result<Self> {
        GridSpec::new((mu1 / 2.0).max(1e-3), 0.9 * t_max, points)
    }

    pub fn abscissae(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let n = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == n {
                    self.hi
                } else {
                    (a + (b - a) * i as f64 / n as f64).exp()
                }
            })
            .collect()
    }

    pub fn clamp_hi(&self, hi: f64) -> Result<Self> {
        GridSpec::new(self.lo, self.hi.min(hi), self.points)
    }
}

/// A sampled function of `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub label: String,
    pub value_name: String,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl CurveSample {
    pub fn new(label: impl Into<String>, value_name: impl Into<String>) -> Self {
        CurveSample {
            label: label.into(),
            value_name: value_name.into(),
            t: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, value: f64) {
        self.t.push(t);
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// CSV with a header row `t,<value_name>`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("t,{}\n", self.value_name);
        for (t, v) in self.t.iter().zip(&self.values) {
            out.push_str(&format!("{t:.12e},{v:.12e}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = GridSpec::new(0.5, 3.0, 11).unwrap();
        let ts = g.abscissae();
        assert_eq!(ts.len(), 11);
        assert!((ts[0] - 0.5).abs() < 1e-15);
        assert_eq!(ts[10], 3.0);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(GridSpec::new(0.0, 1.0, 4).is_err());
        assert!(GridSpec::new(2.0, 1.0, 4).is_err());
        assert!(GridSpec::new(1.0, 2.0, 1).is_err());
    }
}
