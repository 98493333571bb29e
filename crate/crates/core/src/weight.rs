//! Radial weight functions `v`, evaluated as `log v(t)`, and the associated
//! weight sequence `M^v_j = sup_t t^j v(t)`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::curve::GridSpec;
use crate::error::{Error, Result};
use crate::omega::OmegaEvaluator;
use crate::relations::check_mg;
use crate::sequence::{Construction, Family, LogSequence};

/// Left end of the search bracket in `s = log t`.
const BRACKET_LO: f64 = -20.0;
/// Right end cap for weights defined on all of `[0, ∞)`; bounded domains
/// use their own end.
const BRACKET_CAP: f64 = 60.0;
/// Width in `s` at which the ternary search stops.
const SEARCH_TOL: f64 = 1e-10;
/// A right-end slope above this at the cap means no interior maximizer.
const CAP_SLOPE_TOL: f64 = 1e-6;
const SLOPE_STEP: f64 = 1e-6;
/// Grid size for the search used when the weight is not known to be convex.
const SCAN_POINTS: usize = 2048;

/// How a sequence `M` is turned into a weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "c")]
pub enum SequenceMode {
    /// `v_{M,c}(t) = exp(−ω_M(ct))`.
    Dilate(f64),
    /// `v^c_M(t) = exp(−c ω_M(t))`.
    Power(f64),
}

/// Declared properties; `None` means "derive when asked".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightFlags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convex: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rapidly_decreasing: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moderate_growth: Option<bool>,
}

#[derive(Debug, Clone)]
pub enum WeightKind {
    /// `v(t) = exp(−a t^b)`.
    ExpPower {
        a: f64,
        b: f64,
    },
    FromSequence {
        sequence: LogSequence,
        omega: Arc<OmegaEvaluator>,
        mode: SequenceMode,
    },
    Product(Box<Weight>, Box<Weight>),
    /// `1` on `[0, 1]`, `min(1, v(t)/v(1))` beyond.
    Normalized(Box<Weight>),
    /// `e^{log_factor} · v`.
    Scaled {
        inner: Box<Weight>,
        log_factor: f64,
    },
    /// Piecewise linear in `(log t, log v)` through the knots; constant
    /// below the first knot, undefined beyond the last.
    Table {
        log_t: Vec<f64>,
        log_v: Vec<f64>,
    },
}

/// A radial weight. Cheap to clone; the associated sequence is memoized
/// for the first horizon it is requested at.
#[derive(Debug, Clone)]
pub struct Weight {
    kind: WeightKind,
    flags: WeightFlags,
    assoc: OnceLock<(usize, LogSequence)>,
}

impl Weight {
    fn from_kind(kind: WeightKind) -> Self {
        Weight {
            kind,
            flags: WeightFlags::default(),
            assoc: OnceLock::new(),
        }
    }

    pub fn exp_power(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exp-power weight needs a, b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Weight::from_kind(WeightKind::ExpPower { a, b }))
    }

    pub fn from_sequence(m: &LogSequence, mode: SequenceMode) -> Result<Self> {
        let c = match mode {
            SequenceMode::Dilate(c) | SequenceMode::Power(c) => c,
        };
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight parameter c = {c} must be > 0")));
        }
        Ok(Weight::from_kind(WeightKind::FromSequence {
            sequence: m.clone(),
            omega: Arc::new(OmegaEvaluator::new(m)),
            mode,
        }))
    }

    /// `v_M = exp(−ω_M)`.
    pub fn v_m(m: &LogSequence) -> Self {
        Weight::from_sequence(m, SequenceMode::Dilate(1.0)).expect("c = 1 is valid")
    }

    pub fn product(v: &Weight, w: &Weight) -> Self {
        Weight::from_kind(WeightKind::Product(Box::new(v.clone()), Box::new(w.clone())))
    }

    pub fn scaled(v: &Weight, log_factor: f64) -> Self {
        Weight::from_kind(WeightKind::Scaled {
            inner: Box::new(v.clone()),
            log_factor,
        })
    }

    /// Table weight from `(t, log v(t))` knots with `t` strictly increasing
    /// and positive and `log v` non-increasing.
    pub fn table(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "a table weight needs at least two knots".into(),
            ));
        }
        for (i, &(t, lv)) in points.iter().enumerate() {
            if !(t > 0.0 && t.is_finite() && lv.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "table knot {i} must have finite t > 0 and finite log v"
                )));
            }
            if i > 0 {
                let (tp, lvp) = points[i - 1];
                if t <= tp {
                    return Err(Error::InvalidParameter(format!(
                        "table abscissae must increase (knot {i})"
                    )));
                }
                if lv > lvp {
                    return Err(Error::InvalidParameter(format!(
                        "table weight must be non-increasing (knot {i})"
                    )));
                }
            }
        }
        Ok(Weight::from_kind(WeightKind::Table {
            log_t: points.iter().map(|p| p.0.ln()).collect(),
            log_v: points.iter().map(|p| p.1).collect(),
        }))
    }

    /// Overrides the declared flags; unset entries keep being derived.
    pub fn with_flags(mut self, flags: WeightFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn declared_flags(&self) -> WeightFlags {
        self.flags
    }

    /// Flags with every entry resolved.
    pub fn resolved_flags(&self) -> WeightFlags {
        WeightFlags {
            normalized: Some(self.is_normalized()),
            convex: Some(self.is_convex()),
            rapidly_decreasing: Some(self.is_rapidly_decreasing()),
            moderate_growth: Some(self.has_moderate_growth()),
        }
    }

    /// Right end of the closed domain `[0, end]` on which `log v` is known.
    pub fn domain_end(&self) -> f64 {
        match &self.kind {
            WeightKind::ExpPower { .. } => f64::INFINITY,
            WeightKind::FromSequence { omega, mode, .. } => match *mode {
                SequenceMode::Dilate(c) => omega.t_max() / c,
                SequenceMode::Power(_) => omega.t_max(),
            },
            WeightKind::Product(v, w) => v.domain_end().min(w.domain_end()),
            WeightKind::Normalized(v) | WeightKind::Scaled { inner: v, .. } => v.domain_end(),
            WeightKind::Table { log_t, .. } => log_t[log_t.len() - 1].exp(),
        }
    }

    fn log_domain_end(&self) -> f64 {
        match &self.kind {
            WeightKind::ExpPower { .. } => f64::INFINITY,
            WeightKind::FromSequence { omega, mode, .. } => match *mode {
                SequenceMode::Dilate(c) => omega.log_t_max() - c.ln(),
                SequenceMode::Power(_) => omega.log_t_max(),
            },
            WeightKind::Product(v, w) => v.log_domain_end().min(w.log_domain_end()),
            WeightKind::Normalized(v) | WeightKind::Scaled { inner: v, .. } => v.log_domain_end(),
            WeightKind::Table { log_t, .. } => log_t[log_t.len() - 1],
        }
    }

    /// `log v(t)` for `0 ≤ t ≤ domain_end`.
    pub fn log_v(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("argument t = {t} must be >= 0")));
        }
        let s = t.ln();
        if s > self.log_domain_end() {
            return Err(Error::horizon("weight argument", t, self.domain_end()));
        }
        Ok(self.log_v_s(s))
    }

    /// `ω^v(t) = −log v(t)`.
    pub fn omega_v(&self, t: f64) -> Result<f64> {
        self.log_v(t).map(|l| -l)
    }

    /// `log v(e^s)` without a domain check.
    pub(crate) fn log_v_s(&self, s: f64) -> f64 {
        match &self.kind {
            WeightKind::ExpPower { a, b } => -a * (b * s).exp(),
            WeightKind::FromSequence { omega, mode, .. } => match *mode {
                SequenceMode::Dilate(c) => -omega.omega_log(s + c.ln()),
                SequenceMode::Power(c) => -c * omega.omega_log(s),
            },
            WeightKind::Product(v, w) => v.log_v_s(s) + w.log_v_s(s),
            WeightKind::Normalized(v) => {
                if s <= 0.0 {
                    0.0
                } else {
                    (v.log_v_s(s) - v.log_v_s(0.0)).min(0.0)
                }
            }
            WeightKind::Scaled { inner, log_factor } => inner.log_v_s(s) + log_factor,
            WeightKind::Table { log_t, log_v } => {
                if s <= log_t[0] {
                    return log_v[0];
                }
                let i = log_t.partition_point(|&x| x < s).min(log_t.len() - 1);
                let (s0, s1) = (log_t[i - 1], log_t[i]);
                let w = ((s - s0) / (s1 - s0)).min(1.0);
                log_v[i - 1] + w * (log_v[i] - log_v[i - 1])
            }
        }
    }

    pub fn is_normalized(&self) -> bool {
        if let Some(f) = self.flags.normalized {
            return f;
        }
        match &self.kind {
            WeightKind::Normalized(_) => true,
            _ => {
                self.log_domain_end() >= 0.0
                    && [0.0, 0.25, 0.5, 0.75, 1.0]
                        .iter()
                        .all(|&t| self.log_v_s(f64::ln(t)).abs() <= 1e-12)
            }
        }
    }

    /// `s ↦ −log v(e^s)` convex.
    pub fn is_convex(&self) -> bool {
        if let Some(f) = self.flags.convex {
            return f;
        }
        match &self.kind {
            WeightKind::ExpPower { .. } | WeightKind::FromSequence { .. } => true,
            WeightKind::Product(v, w) => v.is_convex() && w.is_convex(),
            WeightKind::Normalized(v) | WeightKind::Scaled { inner: v, .. } => v.is_convex(),
            WeightKind::Table { log_t, log_v } => {
                let slopes: Vec<f64> = (1..log_t.len())
                    .map(|i| -(log_v[i] - log_v[i - 1]) / (log_t[i] - log_t[i - 1]))
                    .collect();
                slopes.windows(2).all(|p| p[1] >= p[0] - 1e-12)
            }
        }
    }

    /// `log t = o(ω^v(t))`.
    ///
    /// Table weights only cover a bounded range; for them the ratio
    /// `ω^v(t)/log t` must trend upwards over the knots.
    pub fn is_rapidly_decreasing(&self) -> bool {
        if let Some(f) = self.flags.rapidly_decreasing {
            return f;
        }
        match &self.kind {
            WeightKind::ExpPower { .. } => true,
            WeightKind::FromSequence { sequence, .. } => sequence.flags().weight_sequence,
            WeightKind::Product(v, w) => v.is_rapidly_decreasing() || w.is_rapidly_decreasing(),
            WeightKind::Normalized(v) | WeightKind::Scaled { inner: v, .. } => v.is_rapidly_decreasing(),
            WeightKind::Table { log_t, log_v } => {
                let (ts, rs): (Vec<f64>, Vec<f64>) = log_t
                    .iter()
                    .zip(log_v)
                    .filter(|(s, _)| **s > 1.0)
                    .map(|(s, l)| (s.exp(), -l / s))
                    .unzip();
                ts.len() >= 4
                    && crate::trend::tail_slope_by_abscissa(&ts, &rs) > crate::trend::Thresholds::default().trend
            }
        }
    }

    /// `u(Ht) ≤ e^H u(t)²` for some `H`.
    pub fn has_moderate_growth(&self) -> bool {
        if let Some(f) = self.flags.moderate_growth {
            return f;
        }
        match &self.kind {
            WeightKind::ExpPower { .. } => true,
            WeightKind::FromSequence { sequence, .. } => check_mg(&crate::sequence::lc_minorant(sequence))
                .map(|v| v.holds())
                .unwrap_or(false),
            WeightKind::Normalized(v) | WeightKind::Scaled { inner: v, .. } => v.has_moderate_growth(),
            WeightKind::Product(v, w) if v.has_moderate_growth() && w.has_moderate_growth() => true,
            _ => crate::weight_checks::om6_grid_check(self)
                .map(|v| v.holds())
                .unwrap_or(false),
        }
    }

    /// Largest index for which `sup_t t^j v(t)` is attained inside the
    /// domain of a sequence-derived weight; `None` when unrestricted.
    ///
    /// For `v_M` the supremum for `j` sits on `[μ_j, μ_{j+1}]`, so index `J`
    /// would need the sequence beyond its horizon.
    pub fn assoc_horizon_limit(&self) -> Option<usize> {
        match &self.kind {
            WeightKind::ExpPower { .. } => None,
            WeightKind::FromSequence { omega, mode, .. } => match *mode {
                SequenceMode::Dilate(_) => Some(omega.horizon() - 1),
                SequenceMode::Power(c) => Some((c * (omega.horizon() - 1) as f64).floor() as usize),
            },
            WeightKind::Product(v, w) => match (v.assoc_horizon_limit(), w.assoc_horizon_limit()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            WeightKind::Normalized(v) | WeightKind::Scaled { inner: v, .. } => v.assoc_horizon_limit(),
            WeightKind::Table { .. } => None,
        }
    }

    /// `min(requested, assoc_horizon_limit)`.
    pub fn assoc_horizon(&self, requested: usize) -> usize {
        self.assoc_horizon_limit().map_or(requested, |l| l.min(requested))
    }

    /// Default sampling grid: the valid domain of `ω_{M^v}`, clipped to the
    /// domain of `v`.
    pub fn default_grid(&self, horizon: usize, points: usize) -> Result<GridSpec> {
        let m = assoc_sequence(self, self.assoc_horizon(horizon))?;
        let eval = OmegaEvaluator::new(&m);
        let grid = eval.default_grid(points)?;
        grid.clamp_hi(0.9 * self.domain_end())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::ExpPower { a, b } => write!(f, "exp(-{a}*t^{b})"),
            WeightKind::FromSequence { mode, .. } => match mode {
                SequenceMode::Dilate(c) => write!(f, "v_M(c={c})"),
                SequenceMode::Power(c) => write!(f, "v_M^{c}"),
            },
            WeightKind::Product(v, w) => write!(f, "({v})*({w})"),
            WeightKind::Normalized(v) => write!(f, "normalized({v})"),
            WeightKind::Scaled { inner, log_factor } => write!(f, "exp({log_factor})*({inner})"),
            WeightKind::Table { log_t, .. } => write!(f, "table({} knots)", log_t.len()),
        }
    }
}

/// Equivalent normalized weight; already normalized weights come back as is.
pub fn normalize(v: &Weight) -> Weight {
    if v.is_normalized() {
        return v.clone();
    }
    Weight::from_kind(WeightKind::Normalized(Box::new(v.clone())))
}

/// `max(1, 1/v(1))`, the constant relating `v` and `normalize(v)`.
pub fn normalization_constant(v: &Weight) -> f64 {
    (-v.log_v_s(0.0)).max(0.0).exp()
}

/// `log M^v_j = sup_s (j s + log v(e^s))`.
pub fn monomial_norm(v: &Weight, j: usize) -> Result<f64> {
    if j == 0 {
        return Ok(v.log_v_s(f64::NEG_INFINITY));
    }
    let jf = j as f64;
    let f = |s: f64| jf * s + v.log_v_s(s);
    let slope = |s: f64| (f(s) - f(s - SLOPE_STEP)) / SLOPE_STEP;
    let end = v.log_domain_end();
    let cap = if end.is_finite() { end } else { BRACKET_CAP };
    if cap <= BRACKET_LO {
        return Err(Error::InvalidParameter(format!(
            "weight domain ends below e^{BRACKET_LO}"
        )));
    }
    let mut hi = cap.min(1.0);
    while slope(hi) >= -1e-9 && hi < cap {
        hi = (2.0 * hi).min(cap);
    }
    if hi >= cap && slope(cap) > CAP_SLOPE_TOL {
        return Err(Error::MaximizerAtBracketCap { index: j, cap });
    }
    let value = if v.is_convex() {
        ternary_max(&f, BRACKET_LO, hi)
    } else {
        let step = (hi - BRACKET_LO) / (SCAN_POINTS - 1) as f64;
        let (best_i, best) = (0..SCAN_POINTS)
            .map(|i| (i, f(BRACKET_LO + step * i as f64)))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        let centre = BRACKET_LO + step * best_i as f64;
        let refined = ternary_max(&f, (centre - step).max(BRACKET_LO), (centre + step).min(hi));
        best.max(refined)
    };
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("associated sequence at index {j}")));
    }
    Ok(value)
}

fn ternary_max(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    while b - a > SEARCH_TOL {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    f(a).max(f(b)).max(f(0.5 * (a + b)))
}

/// The associated weight sequence `M^v` on `0..=horizon`.
pub fn assoc_sequence(v: &Weight, horizon: usize) -> Result<LogSequence> {
    if let Some((h, m)) = v.assoc.get() {
        if *h == horizon {
            return Ok(m.clone());
        }
    }
    if horizon < 1 {
        return Err(Error::InvalidParameter("associated sequence needs horizon >= 1".into()));
    }
    let logvals = (0..=horizon).map(|j| monomial_norm(v, j)).collect::<Result<Vec<_>>>()?;
    let m = LogSequence::from_logvals(
        logvals,
        Family::Derived {
            construction: Construction::FromWeight,
        },
    )?;
    let _ = v.assoc.set((horizon, m.clone()));
    Ok(m)
}

/// `log P_v(t) = ω_{M^v}(t)`.
pub fn p_function(v: &Weight, horizon: usize, t: f64) -> Result<f64> {
    let m = assoc_sequence(v, horizon)?;
    OmegaEvaluator::new(&m).omega(t)
}
