//! Finite-horizon weight sequences stored in the natural-log domain.
//!
//! A [`LogSequence`] holds `ℓ_j = log M_j` for `0 ≤ j ≤ J` together with the
//! log-quotients `λ_j = ℓ_j − ℓ_{j−1}`. All constructions (log-convex
//! minorant, rescaling, the `(M_{cj})^{1/c}` sequences, min-plus
//! convolution) stay in log space, so q-Gevrey sequences at large horizons
//! never overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trend::Thresholds;

/// Smallest horizon accepted for closed-form families.
pub const MIN_FAMILY_HORIZON: usize = 8;

/// Relative tolerance when testing quotients for monotonicity.
const CONVEXITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    /// `M_j = (j!)^s`.
    Gevrey {
        s: f64,
    },
    /// `M_j = q^{j²}`.
    QGevrey {
        q: f64,
    },
    /// Explicit log-values.
    Table,
    Derived {
        construction: Construction,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op")]
pub enum Construction {
    Scaled { c: f64 },
    Tilde { c: usize },
    Underline { c: usize },
    Convolved,
    Minorant,
    Normalized { first_positive: usize },
    Truncated,
    FromWeight,
}

/// Requested family for [`make_sequence`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum FamilySpec {
    Gevrey { s: f64 },
    QGevrey { q: f64 },
    Table { logvals: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceFlags {
    pub log_convex: bool,
    /// `ℓ_0 = 0 ≤ ℓ_1`.
    pub normalized: bool,
    /// Normalized and log-convex.
    pub lc: bool,
    /// Finite-horizon surrogate for `(M_j)^{1/j} → ∞`; only gates warnings.
    pub weight_sequence: bool,
}

/// A weight sequence on the horizon `0..=J`, stored as `ℓ_j = log M_j`.
///
/// Immutable after construction: quotients and flags are filled eagerly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSequence {
    logvals: Vec<f64>,
    /// `lambda[j] = ℓ_j − ℓ_{j−1}` for `j ≥ 1`; `lambda[0]` is unused and 0.
    lambda: Vec<f64>,
    family: Family,
    flags: SequenceFlags,
}

impl LogSequence {
    /// Builds a sequence from explicit log-values; at least two entries.
    pub fn from_logvals(logvals: Vec<f64>, family: Family) -> Result<Self> {
        if logvals.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a sequence needs horizon >= 1, got {} values",
                logvals.len()
            )));
        }
        if let Some(j) = logvals.iter().position(|l| !l.is_finite()) {
            return Err(Error::NonFinite(format!("log-value at index {j}")));
        }
        let logvals: Vec<f64> = logvals.into_iter().map(|l| l + 0.0).collect();
        let mut lambda = vec![0.0; logvals.len()];
        for j in 1..logvals.len() {
            lambda[j] = logvals[j] - logvals[j - 1];
        }
        let flags = compute_flags(&logvals, &lambda, Thresholds::default().divergence);
        Ok(LogSequence {
            logvals,
            lambda,
            family,
            flags,
        })
    }

    pub fn horizon(&self) -> usize {
        self.logvals.len() - 1
    }

    pub fn logvals(&self) -> &[f64] {
        &self.logvals
    }

    pub fn log_value(&self, j: usize) -> f64 {
        self.logvals[j]
    }

    /// `λ_j = log μ_j` for `1 ≤ j ≤ J`.
    pub fn log_quotient(&self, j: usize) -> f64 {
        assert!(j >= 1, "quotients start at index 1");
        self.lambda[j]
    }

    /// `λ_1..λ_J`.
    pub fn log_quotients(&self) -> &[f64] {
        &self.lambda[1..]
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn flags(&self) -> SequenceFlags {
        self.flags
    }

    pub fn is_log_convex(&self) -> bool {
        self.flags.log_convex
    }

    pub fn is_lc(&self) -> bool {
        self.flags.lc
    }

    /// Weight-sequence surrogate with a caller-supplied divergence threshold.
    pub fn is_weight_sequence_with(&self, divergence: f64) -> bool {
        compute_flags(&self.logvals, &self.lambda, divergence).weight_sequence
    }

    pub(crate) fn closed_form(&self) -> Option<ClosedForm> {
        match self.family {
            Family::Gevrey { s } => Some(ClosedForm::Gevrey(s)),
            Family::QGevrey { q } => Some(ClosedForm::QGevrey(q)),
            _ => None,
        }
    }

    fn derived(&self, logvals: Vec<f64>, construction: Construction) -> Result<Self> {
        LogSequence::from_logvals(logvals, Family::Derived { construction })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum ClosedForm {
    Gevrey(f64),
    QGevrey(f64),
}

fn compute_flags(logvals: &[f64], lambda: &[f64], divergence: f64) -> SequenceFlags {
    let horizon = logvals.len() - 1;
    let log_convex = (2..=horizon).all(|j| {
        let tol = CONVEXITY_TOL * lambda[j].abs().max(lambda[j - 1].abs()).max(1.0);
        lambda[j] >= lambda[j - 1] - tol
    });
    let normalized = logvals[0] == 0.0 && logvals[1] >= 0.0;
    // ℓ_j / j eventually increasing: checked over the tail half.
    let tail_start = (horizon / 2).max(1);
    let increasing_tail =
        (tail_start + 1..=horizon).all(|j| logvals[j] / j as f64 >= logvals[j - 1] / (j - 1) as f64 - 1e-12);
    let weight_sequence = increasing_tail && logvals[horizon] / horizon as f64 >= divergence;
    SequenceFlags {
        log_convex,
        normalized,
        lc: log_convex && normalized,
        weight_sequence,
    }
}

/// Builds a closed-form or tabulated sequence on `0..=horizon`.
///
/// Closed-form families need `horizon ≥ 8`; tables take their horizon from
/// the number of supplied values.
pub fn make_sequence(family: &FamilySpec, horizon: usize) -> Result<LogSequence> {
    match *family {
        FamilySpec::Gevrey { s } => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!("Gevrey order s = {s} must be > 0")));
            }
            check_family_horizon(horizon)?;
            let mut logvals = Vec::with_capacity(horizon + 1);
            let mut log_fact = 0.0;
            logvals.push(0.0);
            for j in 1..=horizon {
                log_fact += (j as f64).ln();
                logvals.push(s * log_fact);
            }
            LogSequence::from_logvals(logvals, Family::Gevrey { s })
        }
        FamilySpec::QGevrey { q } => {
            if !(q > 1.0 && q.is_finite()) {
                return Err(Error::InvalidParameter(format!("q-Gevrey base q = {q} must be > 1")));
            }
            check_family_horizon(horizon)?;
            let lq = q.ln();
            let logvals = (0..=horizon).map(|j| (j * j) as f64 * lq).collect();
            LogSequence::from_logvals(logvals, Family::QGevrey { q })
        }
        FamilySpec::Table { ref logvals } => LogSequence::from_logvals(logvals.clone(), Family::Table),
    }
}

fn check_family_horizon(horizon: usize) -> Result<()> {
    if horizon < MIN_FAMILY_HORIZON {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is below the minimum {MIN_FAMILY_HORIZON}"
        )));
    }
    Ok(())
}

/// `(j!)^s` on `0..=horizon`.
pub fn gevrey(s: f64, horizon: usize) -> Result<LogSequence> {
    make_sequence(&FamilySpec::Gevrey { s }, horizon)
}

/// `q^{j²}` on `0..=horizon`.
pub fn q_gevrey(q: f64, horizon: usize) -> Result<LogSequence> {
    make_sequence(&FamilySpec::QGevrey { q }, horizon)
}

/// Log-convex minorant: the lower convex hull of `(j, ℓ_j)`.
///
/// Log-convex inputs are returned unchanged (bit-identical).
pub fn lc_minorant(m: &LogSequence) -> LogSequence {
    if m.is_log_convex() {
        return m.clone();
    }
    let l = m.logvals();
    // Andrew's monotone chain, lower half only.
    let mut hull: Vec<usize> = Vec::with_capacity(l.len());
    for j in 0..l.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when it lies on or above the chord a..j.
            let cross = (b - a) as f64 * (l[j] - l[a]) - (j - a) as f64 * (l[b] - l[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(j);
    }
    let mut out = l.to_vec();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (l[b] - l[a]) / (b - a) as f64;
        for (j, o) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            *o = l[a] + slope * (j - a) as f64;
        }
    }
    m.derived(out, Construction::Minorant)
        .expect("hull of finite values is finite")
}

/// Result of [`lc_normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct LcNormalization {
    pub sequence: LogSequence,
    /// First index with a strictly positive log-quotient.
    pub first_positive: usize,
    /// `C ≥ 1` with `N_j / C ≤ M_j ≤ C N_j` for all stored `j`.
    pub constant: f64,
}

/// Replaces the non-positive leading quotients of a log-convex sequence by 1,
/// producing an equivalent LC sequence.
pub fn lc_normalize(m: &LogSequence) -> Result<LcNormalization> {
    if !m.is_log_convex() {
        return Err(Error::NotLogConvex);
    }
    let j0 = (1..=m.horizon())
        .find(|&j| m.log_quotient(j) > 0.0)
        .ok_or(Error::NoPositiveQuotient)?;
    if m.is_lc() {
        return Ok(LcNormalization {
            sequence: m.clone(),
            first_positive: j0,
            constant: 1.0,
        });
    }
    let log_c = m.log_value(0).abs() + (1..j0).map(|j| m.log_quotient(j).abs()).sum::<f64>();
    let mut logvals = vec![0.0; m.horizon() + 1];
    for j in j0..=m.horizon() {
        logvals[j] = logvals[j - 1] + m.log_quotient(j);
    }
    Ok(LcNormalization {
        sequence: m.derived(logvals, Construction::Normalized { first_positive: j0 })?,
        first_positive: j0,
        constant: log_c.exp(),
    })
}

/// `M^c = (c^j M_j)_j`.
pub fn scale(m: &LogSequence, c: f64) -> Result<LogSequence> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale factor c = {c} must be > 0")));
    }
    if c == 1.0 {
        return Ok(m.clone());
    }
    let lc = c.ln();
    let logvals = m.logvals().iter().enumerate().map(|(j, l)| l + j as f64 * lc).collect();
    m.derived(logvals, Construction::Scaled { c })
}

/// `(M_{cj})^{1/c}` on the largest horizon `⌊J/c⌋`.
pub fn tilde(m: &LogSequence, c: usize) -> Result<LogSequence> {
    if c == 0 {
        return Err(Error::InvalidParameter("tilde parameter c must be >= 1".into()));
    }
    tilde_to(m, c, m.horizon() / c)
}

/// `(M_{cj})^{1/c}` for `0 ≤ j ≤ horizon`; needs `c · horizon ≤ J`.
pub fn tilde_to(m: &LogSequence, c: usize, horizon: usize) -> Result<LogSequence> {
    if c == 0 {
        return Err(Error::InvalidParameter("tilde parameter c must be >= 1".into()));
    }
    if c * horizon > m.horizon() {
        return Err(Error::horizon(
            "c * output horizon",
            (c * horizon) as f64,
            m.horizon() as f64,
        ));
    }
    if c == 1 && horizon == m.horizon() {
        return Ok(m.clone());
    }
    let cf = c as f64;
    let logvals = (0..=horizon).map(|j| m.log_value(c * j) / cf).collect();
    m.derived(logvals, Construction::Tilde { c })
}

/// First `horizon + 1` entries of `m`.
pub fn truncate(m: &LogSequence, horizon: usize) -> Result<LogSequence> {
    if horizon > m.horizon() {
        return Err(Error::horizon("truncation horizon", horizon as f64, m.horizon() as f64));
    }
    if horizon == m.horizon() {
        return Ok(m.clone());
    }
    let family = match m.family() {
        f @ (Family::Gevrey { .. } | Family::QGevrey { .. }) if horizon >= MIN_FAMILY_HORIZON => f.clone(),
        _ => Family::Derived {
            construction: Construction::Truncated,
        },
    };
    LogSequence::from_logvals(m.logvals()[..=horizon].to_vec(), family)
}

/// Result of [`convolve_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct Convolution {
    pub sequence: LogSequence,
    /// Smallest `k` attaining `min_k M_k N_{j−k}` for each `j`.
    pub argmin: Vec<usize>,
    /// Whether the quotient merge was used.
    pub merged: bool,
}

/// `(M⋆N)_j = min_{0≤k≤j} M_k N_{j−k}`.
pub fn convolve(m: &LogSequence, n: &LogSequence) -> Result<LogSequence> {
    convolve_detailed(m, n).map(|c| c.sequence)
}

/// Convolution plus the minimizing split for each index.
///
/// Log-convex operands are combined by merging their quotient sequences;
/// anything else goes through the direct minimum.
pub fn convolve_detailed(m: &LogSequence, n: &LogSequence) -> Result<Convolution> {
    check_common_horizon(m, n)?;
    if m.is_log_convex() && n.is_log_convex() {
        convolve_by_merge(m, n)
    } else {
        convolve_by_min(m, n)
    }
}

pub(crate) fn check_common_horizon(m: &LogSequence, n: &LogSequence) -> Result<()> {
    if m.horizon() != n.horizon() {
        return Err(Error::InvalidParameter(format!(
            "operands need a common horizon, got {} and {}",
            m.horizon(),
            n.horizon()
        )));
    }
    Ok(())
}

/// Direct `O(J²)` minimum; smallest `k` on ties.
pub fn convolve_by_min(m: &LogSequence, n: &LogSequence) -> Result<Convolution> {
    check_common_horizon(m, n)?;
    let horizon = m.horizon();
    let (lm, ln) = (m.logvals(), n.logvals());
    let mut logvals = Vec::with_capacity(horizon + 1);
    let mut argmin = Vec::with_capacity(horizon + 1);
    for j in 0..=horizon {
        let (k, v) = min_split(lm, ln, j, 0, j);
        logvals.push(v);
        argmin.push(k);
    }
    Ok(Convolution {
        sequence: m.derived(logvals, Construction::Convolved)?,
        argmin,
        merged: false,
    })
}

fn min_split(lm: &[f64], ln: &[f64], j: usize, lo: usize, hi: usize) -> (usize, f64) {
    let mut best = (lo, lm[lo] + ln[j - lo]);
    for k in lo + 1..=hi {
        let v = lm[k] + ln[j - k];
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}

/// Merge of the two non-decreasing quotient sequences.
///
/// For each `j` the merge determines how many of the first `j` merged
/// quotients come from `M`; with ties that count ranges over an interval,
/// and the value is the minimum of `ℓ^M_k + ℓ^N_{j−k}` over it. This keeps
/// the result exactly symmetric in its operands.
fn convolve_by_merge(m: &LogSequence, n: &LogSequence) -> Result<Convolution> {
    let horizon = m.horizon();
    let (qm, qn) = (m.log_quotients(), n.log_quotients());
    let lo = merge_counts(qm, qn, horizon, false);
    let hi = merge_counts(qm, qn, horizon, true);
    let (lm, ln) = (m.logvals(), n.logvals());
    let mut logvals = Vec::with_capacity(horizon + 1);
    let mut argmin = Vec::with_capacity(horizon + 1);
    for j in 0..=horizon {
        let (k, v) = min_split(lm, ln, j, lo[j], hi[j]);
        logvals.push(v);
        argmin.push(k);
    }
    Ok(Convolution {
        sequence: m.derived(logvals, Construction::Convolved)?,
        argmin,
        merged: true,
    })
}

/// Number of `M`-quotients among the first `j` merged quotients, `0 ≤ j ≤ J`.
fn merge_counts(qm: &[f64], qn: &[f64], horizon: usize, prefer_m: bool) -> Vec<usize> {
    let (mut i, mut k) = (0usize, 0usize);
    let mut counts = Vec::with_capacity(horizon + 1);
    counts.push(0);
    for _ in 0..horizon {
        let take_m = match (qm.get(i), qn.get(k)) {
            (Some(a), Some(b)) => {
                if prefer_m {
                    a <= b
                } else {
                    a < b
                }
            }
            (Some(_), None) => true,
            _ => false,
        };
        if take_m {
            i += 1;
        } else {
            k += 1;
        }
        counts.push(i);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(v: &[f64]) -> LogSequence {
        make_sequence(&FamilySpec::Table { logvals: v.to_vec() }, 0).unwrap()
    }

    #[test]
    fn gevrey_log_values() {
        let g = gevrey(1.0, 8).unwrap();
        let expect = [0.0, 0.0, 2f64.ln(), 6f64.ln(), 24f64.ln()];
        for (j, e) in expect.iter().enumerate() {
            assert!((g.log_value(j) - e).abs() < 1e-14);
        }
        assert!(g.is_lc());
        assert!(!g.flags().weight_sequence);
        assert!(gevrey(1.0, 64).unwrap().flags().weight_sequence);
    }

    #[test]
    fn q_gevrey_log_values() {
        let q = q_gevrey(2.0, 8).unwrap();
        let l2 = 2f64.ln();
        for (j, e) in [0.0, l2, 4.0 * l2, 9.0 * l2].iter().enumerate() {
            assert!((q.log_value(j) - e).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_family_parameters() {
        assert!(matches!(gevrey(0.0, 16), Err(Error::InvalidParameter(_))));
        assert!(matches!(q_gevrey(1.0, 16), Err(Error::InvalidParameter(_))));
        assert!(matches!(gevrey(1.0, 7), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn decreasing_first_quotient_breaks_lc() {
        let t = table(&[0.0, -0.1, 0.5, 1.5]);
        assert!(t.is_log_convex());
        assert!(!t.is_lc());
    }

    #[test]
    fn hull_of_four_points() {
        let h = lc_minorant(&table(&[0.0, 2.0, 1.0, 3.0]));
        let expect = [0.0, 0.5, 1.0, 3.0];
        for (a, b) in h.logvals().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(h.is_log_convex());
    }

    #[test]
    fn hull_keeps_convex_input() {
        let g = gevrey(1.0, 64).unwrap();
        assert_eq!(lc_minorant(&g).logvals(), g.logvals());
    }

    #[test]
    fn normalize_moves_leading_quotients() {
        let lambdas = [0.5f64.ln(), 1.5f64.ln(), 2.5f64.ln(), 3.5f64.ln()];
        let mut l = vec![0.0];
        for x in lambdas {
            l.push(l.last().unwrap() + x);
        }
        let out = lc_normalize(&table(&l)).unwrap();
        assert_eq!(out.first_positive, 2);
        assert!((out.constant - 2.0).abs() < 1e-12);
        assert!(out.sequence.is_lc());
        assert_eq!(out.sequence.log_value(1), 0.0);
        assert!((out.sequence.log_quotient(2) - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn normalize_errors() {
        assert_eq!(
            lc_normalize(&table(&[0.0, 2.0, 1.0, 3.0])).unwrap_err(),
            Error::NotLogConvex
        );
        assert_eq!(
            lc_normalize(&table(&[0.0, -1.0, -2.0, -3.0])).unwrap_err(),
            Error::NoPositiveQuotient
        );
    }

    #[test]
    fn normalize_keeps_gevrey() {
        let g = gevrey(1.0, 16).unwrap();
        let out = lc_normalize(&g).unwrap();
        assert_eq!(out.sequence, g);
        assert_eq!(out.constant, 1.0);
    }

    #[test]
    fn scale_by_half_loses_normalization() {
        let g = gevrey(1.0, 16).unwrap();
        let h = scale(&g, 0.5).unwrap();
        assert!(h.is_log_convex());
        assert!(!h.flags().normalized);
        assert!(scale(&g, 0.0).is_err());
        assert_eq!(scale(&g, 1.0).unwrap(), g);
    }

    #[test]
    fn tilde_values() {
        let g = gevrey(1.0, 16).unwrap();
        let t = tilde(&g, 2).unwrap();
        assert_eq!(t.horizon(), 8);
        assert!((t.log_value(2) - 24f64.sqrt().ln()).abs() < 1e-14);
        assert!(t.is_lc());
        assert!((0..=8).all(|j| t.log_value(j) >= g.log_value(j)));
        assert_eq!(tilde(&g, 1).unwrap(), g);
        assert!(matches!(tilde_to(&g, 2, 9), Err(Error::HorizonExceeded { .. })));

        let q = q_gevrey(3.0, 16).unwrap();
        let tq = tilde(&q, 2).unwrap();
        for j in 0..=8 {
            let e = 2.0 * (j * j) as f64 * 3f64.ln();
            assert!((tq.log_value(j) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn gevrey_self_convolution() {
        let g = gevrey(1.0, 16).unwrap();
        let c = convolve_detailed(&g, &g).unwrap();
        assert!(c.merged);
        assert!((c.sequence.log_value(4) - 4f64.ln()).abs() < 1e-14);
        assert_eq!(c.argmin[4], 2);
        let brute = convolve_by_min(&g, &g).unwrap();
        assert_eq!(brute.argmin[4], 2);
        assert!((brute.sequence.log_value(4) - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn convolution_needs_common_horizon() {
        let a = gevrey(1.0, 16).unwrap();
        let b = gevrey(1.0, 17).unwrap();
        assert!(convolve(&a, &b).is_err());
    }
}
