//! The associated weight function `ω_M(t) = sup_j log(t^j / M_j)`, its
//! counting function, the inversion back to `M^lc` and the underline
//! sequences `sup_t t^j exp(−c ω_M(t))`.

use crate::curve::{CurveSample, GridSpec};
use crate::error::{Error, Result};
use crate::sequence::{lc_minorant, Construction, Family, LogSequence};

/// Evaluates `ω_M` on `[0, μ_J)` from the quotients of the log-convex minorant.
///
/// With `k = Σ_M(t) = #{j ≥ 1 : μ_j ≤ t}` the supremum is attained at `j = k`,
/// so `ω_M(t) = k log t − ℓ^lc_k` after a binary search.
#[derive(Debug, Clone)]
pub struct OmegaEvaluator {
    minorant: LogSequence,
}

impl OmegaEvaluator {
    pub fn new(m: &LogSequence) -> Self {
        OmegaEvaluator {
            minorant: lc_minorant(m),
        }
    }

    /// The log-convex minorant the evaluator works on.
    pub fn minorant(&self) -> &LogSequence {
        &self.minorant
    }

    pub fn horizon(&self) -> usize {
        self.minorant.horizon()
    }

    /// `log μ_J`; `ω` is only valid strictly below `μ_J`.
    pub fn log_t_max(&self) -> f64 {
        self.minorant.log_quotient(self.horizon())
    }

    pub fn t_max(&self) -> f64 {
        self.log_t_max().exp()
    }

    pub fn mu1(&self) -> f64 {
        self.minorant.log_quotient(1).exp()
    }

    /// The default sampling grid `[max(1e-3, μ_1/2), 0.9 μ_J]`.
    pub fn default_grid(&self, points: usize) -> Result<GridSpec> {
        GridSpec::for_domain(self.mu1(), self.t_max(), points)
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("argument t = {t} must be >= 0")));
        }
        if t >= self.t_max() {
            return Err(Error::horizon("omega argument", t, self.t_max()));
        }
        Ok(())
    }

    /// `Σ_M(t)`, the number of quotients `μ_j ≤ t`.
    pub fn counting(&self, t: f64) -> Result<usize> {
        self.check_domain(t)?;
        Ok(self.counting_log(t.ln()))
    }

    pub(crate) fn counting_log(&self, s: f64) -> usize {
        self.minorant.log_quotients().partition_point(|&l| l <= s)
    }

    pub fn omega(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.omega_log(t.ln()))
    }

    /// `ω(e^s)` without a domain check.
    ///
    /// Exact for `e^s ≤ μ_J`; beyond that it is the truncated supremum, a
    /// lower bound for any log-convex continuation.
    pub(crate) fn omega_log(&self, s: f64) -> f64 {
        if s == f64::NEG_INFINITY {
            return -self.minorant.log_value(0);
        }
        let k = self.counting_log(s);
        // `+ 0.0` keeps `0 · s` with `s < 0` from producing −0
        k as f64 * s - self.minorant.log_value(k) + 0.0
    }

    /// `log sup_{t ≥ 0} t^j exp(−ω_M(t)) = ℓ^lc_j`, for `j ≤ J − 1`.
    pub fn invert(&self, j: usize) -> Result<f64> {
        if j + 1 > self.horizon() {
            return Err(Error::horizon("inversion index", j as f64, (self.horizon() - 1) as f64));
        }
        if j == 0 {
            return Ok(self.minorant.log_value(0));
        }
        let s = self.minorant.log_quotient(j);
        Ok(j as f64 * s - self.omega_log(s))
    }

    /// Samples `ω` on a grid; fails if the grid leaves the valid domain.
    pub fn curve(&self, grid: &GridSpec, label: &str) -> Result<CurveSample> {
        let mut out = CurveSample::new(label, "omega");
        for t in grid.abscissae() {
            out.push(t, self.omega(t)?);
        }
        Ok(out)
    }
}

/// `sup_{0≤j≤J} (j log t − ℓ_j)` over the raw table, no minorant involved.
pub fn omega_brute_force(m: &LogSequence, t: f64) -> f64 {
    let lt = t.ln();
    m.logvals()
        .iter()
        .enumerate()
        .map(|(j, l)| if j == 0 { -l } else { j as f64 * lt - l })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `sup_t t^j exp(−c ω_M(t))` on the largest reachable horizon `c·J`.
pub fn underline(m: &LogSequence, c: usize) -> Result<LogSequence> {
    if c == 0 {
        return Err(Error::InvalidParameter("underline parameter c must be >= 1".into()));
    }
    underline_to(m, c, c * m.horizon())
}

/// Underline sequence on `0..=horizon`; the supremum for index `j` sits at
/// `t = μ_k`, `k = ⌈j/c⌉`, so `horizon ≤ c·J` is required.
pub fn underline_to(m: &LogSequence, c: usize, horizon: usize) -> Result<LogSequence> {
    if !m.is_lc() {
        return Err(Error::NotLC);
    }
    if c == 0 {
        return Err(Error::InvalidParameter("underline parameter c must be >= 1".into()));
    }
    if horizon > c * m.horizon() {
        return Err(Error::horizon(
            "underline horizon",
            horizon as f64,
            (c * m.horizon()) as f64,
        ));
    }
    if c == 1 && horizon == m.horizon() {
        return Ok(m.clone());
    }
    let eval = OmegaEvaluator::new(m);
    let cf = c as f64;
    let logvals = (0..=horizon)
        .map(|j| {
            let k = j.div_ceil(c);
            if k == 0 {
                return -cf * eval.omega_log(f64::NEG_INFINITY);
            }
            let s = m.log_quotient(k);
            j as f64 * s - cf * eval.omega_log(s)
        })
        .collect();
    LogSequence::from_logvals(
        logvals,
        Family::Derived {
            construction: Construction::Underline { c },
        },
    )
}
