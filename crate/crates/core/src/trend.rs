//! Boundedness heuristics for finite-horizon statistics.

use serde::{Deserialize, Serialize};

/// Thresholds used to classify finite-horizon statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// A statistic whose tail slope against the log of its abscissa exceeds
    /// this value is classified as diverging.
    pub trend: f64,
    /// Strictly positive margin required by the (ω_1) sequence characterization.
    pub om1_margin: f64,
    /// `ℓ_J / J` must reach this value for the weight-sequence flag.
    pub divergence: f64,
    /// Slack for sign-constrained gaps.
    pub slack: f64,
    /// When false, closed-form families are treated like tabulated ones.
    pub use_rule_table: bool,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            trend: 0.05,
            om1_margin: 1.05f64.ln(),
            divergence: 10f64.ln(),
            slack: 1e-9,
            use_rule_table: true,
        }
    }
}

impl Thresholds {
    pub fn is_bounded(&self, slope: f64) -> bool {
        slope <= self.trend
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Slope of an index-indexed statistic against `ln j` over the tail half of
/// the supplied index range `[first, last]`.
pub fn tail_slope_by_index(first: usize, last: usize, stat: impl Fn(usize) -> f64) -> f64 {
    let first = first.max(1);
    if last <= first {
        return 0.0;
    }
    let start = (first + last).div_ceil(2).max(first);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..=last).map(|j| ((j as f64).ln(), stat(j))).unzip();
    ols_slope(&xs, &ys)
}

/// Slope of sampled values against `ln t` over the upper half of the samples.
pub fn tail_slope_by_abscissa(ts: &[f64], ys: &[f64]) -> f64 {
    let n = ts.len();
    if n < 2 {
        return 0.0;
    }
    let start = n / 2;
    let xs: Vec<f64> = ts[start..].iter().map(|t| t.ln()).collect();
    ols_slope(&xs, &ys[start..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((ols_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_statistic_has_zero_trend() {
        let s = tail_slope_by_index(1, 512, |_| 0.7);
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn log_growth_has_unit_trend() {
        let s = tail_slope_by_index(1, 512, |j| (j as f64).ln());
        assert!((s - 1.0).abs() < 1e-9);
    }
}
