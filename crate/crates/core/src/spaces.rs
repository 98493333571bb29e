//! Weighted spaces of entire functions: inclusion, equality and
//! multiplication-closure decisions, and the θ test functions.
//!
//! Every decision is a dispatch to a sequence or weight check; the returned
//! [`Decision`] names the rule that was applied and the condition tested.

use serde::{Deserialize, Serialize};

use crate::curve::GridSpec;
use crate::error::{Error, Result};
use crate::omega::OmegaEvaluator;
use crate::relations::{check_mg_with, check_preceq_with, check_strong_dom_with, check_tilde_dom_with};
use crate::sequence::{convolve, lc_minorant, lc_normalize, LogSequence};
use crate::trend::Thresholds;
use crate::verdict::{Status, Verdict, Witness};
use crate::weight::{assoc_sequence, Weight};
use crate::weight_checks::{check_weight_condition_with, check_weight_relation_with, RelationKind, WeightCondition};

/// Log-units below the running maximum at which θ series are truncated.
pub const THETA_TRUNCATION: f64 = 40.0;

#[derive(Debug, Clone)]
pub enum WeightSource {
    Sequence(LogSequence),
    Function(Weight),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    /// The single weight `v`.
    Single,
    /// `(v(c·))_c` as an inductive limit.
    DilatationInductive,
    /// `(v(·/c))_c` as a projective limit.
    DilatationProjective,
    /// `(v^c)_c` as an inductive limit.
    ExponentialInductive,
    /// `(v^{1/c})_c` as a projective limit.
    ExponentialProjective,
}

impl SystemKind {
    pub const ALL: [SystemKind; 5] = [
        SystemKind::Single,
        SystemKind::DilatationInductive,
        SystemKind::DilatationProjective,
        SystemKind::ExponentialInductive,
        SystemKind::ExponentialProjective,
    ];

    pub fn is_dilatation(self) -> bool {
        matches!(self, SystemKind::DilatationInductive | SystemKind::DilatationProjective)
    }

    pub fn is_exponential(self) -> bool {
        matches!(
            self,
            SystemKind::ExponentialInductive | SystemKind::ExponentialProjective
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            SystemKind::Single => "single",
            SystemKind::DilatationInductive => "dilatation-inductive",
            SystemKind::DilatationProjective => "dilatation-projective",
            SystemKind::ExponentialInductive => "exponential-inductive",
            SystemKind::ExponentialProjective => "exponential-projective",
        }
    }
}

impl std::str::FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SystemKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown system kind '{s}'")))
    }
}

/// A weighted space: `H^∞_v` or the space of one of the four weight systems.
#[derive(Debug, Clone)]
pub struct SpaceSpec {
    pub source: WeightSource,
    pub system: SystemKind,
}

impl SpaceSpec {
    pub fn sequence(m: LogSequence, system: SystemKind) -> Self {
        SpaceSpec {
            source: WeightSource::Sequence(m),
            system,
        }
    }

    pub fn function(v: Weight, system: SystemKind) -> Self {
        SpaceSpec {
            source: WeightSource::Function(v),
            system,
        }
    }
}

/// Horizon and grid used when function sources are reduced to sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionSettings {
    pub thresholds: Thresholds,
    /// Requested horizon for associated sequences `M^u`.
    pub horizon: usize,
    pub grid_points: usize,
}

impl Default for DecisionSettings {
    fn default() -> Self {
        DecisionSettings {
            thresholds: Thresholds::default(),
            horizon: 512,
            grid_points: 64,
        }
    }
}

/// A verdict with the rule that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub rule: String,
    /// The sequence- or weight-level condition that was tested.
    pub condition: String,
    /// For dilatation closure on sequences: `M ⋆ M`, the sequence of the
    /// space products land in (with dilation `H`).
    #[serde(skip)]
    pub landing: Option<LogSequence>,
}

impl Decision {
    fn new(verdict: Verdict, rule: &str, condition: &str) -> Self {
        Decision {
            verdict,
            rule: rule.to_string(),
            condition: condition.to_string(),
            landing: None,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

pub mod rules {
    pub const SINGLE_SEQUENCE: &str = "single-sequence-strong-domination";
    pub const DILATATION_SEQUENCE: &str = "dilatation-sequence-preceq";
    pub const EXPONENTIAL_SEQUENCE: &str = "exponential-sequence-tilde-domination";
    pub const SINGLE_FUNCTION: &str = "single-function-associated-weight";
    pub const DILATATION_FUNCTION: &str = "dilatation-function-associated-preceq";
    pub const DILATATION_FUNCTION_DIRECT: &str = "dilatation-function-weight-relation";
    pub const EXPONENTIAL_FUNCTION: &str = "exponential-function-associated-tilde-domination";
    pub const EXPONENTIAL_FUNCTION_DIRECT: &str = "exponential-function-weight-relation";
    pub const CLOSURE_SINGLE: &str = "single-never-closed";
    pub const CLOSURE_EXPONENTIAL: &str = "exponential-always-closed";
    pub const CLOSURE_DILATATION_SEQUENCE: &str = "dilatation-sequence-moderate-growth";
    pub const CLOSURE_DILATATION_FUNCTION: &str = "dilatation-function-moderate-growth";
}

fn check_systems(a: SystemKind, b: SystemKind) -> Result<()> {
    if a != b {
        return Err(Error::IncompatibleSystems(format!(
            "{} vs {}: only like systems are compared",
            a.label(),
            b.label()
        )));
    }
    Ok(())
}

/// Log-convex representative with the same space; notes when it differs.
fn log_convex_rep(m: &LogSequence, notes: &mut Vec<String>) -> LogSequence {
    if m.is_log_convex() {
        m.clone()
    } else {
        notes.push("replaced by its log-convex minorant (same associated weight)".into());
        lc_minorant(m)
    }
}

/// LC representative for the exponential case; notes when it differs.
fn lc_rep(m: &LogSequence, notes: &mut Vec<String>) -> Result<LogSequence> {
    let m = log_convex_rep(m, notes);
    if m.is_lc() {
        return Ok(m);
    }
    let n = lc_normalize(&m)?;
    notes.push(format!(
        "verdict is for the normalized representative (equivalent within factor {:.6e})",
        n.constant
    ));
    Ok(n.sequence)
}

fn as_function(src: &WeightSource) -> Weight {
    match src {
        WeightSource::Sequence(m) => Weight::v_m(m),
        WeightSource::Function(v) => v.clone(),
    }
}

pub fn decide_inclusion(a: &SpaceSpec, b: &SpaceSpec) -> Result<Decision> {
    decide_inclusion_with(a, b, &DecisionSettings::default())
}

/// Decides `space(a) ⊆ space(b)`.
pub fn decide_inclusion_with(a: &SpaceSpec, b: &SpaceSpec, st: &DecisionSettings) -> Result<Decision> {
    check_systems(a.system, b.system)?;
    match (&a.source, &b.source) {
        (WeightSource::Sequence(m), WeightSource::Sequence(n)) => sequence_inclusion(m, n, a.system, st),
        (sa, sb) => function_inclusion(&as_function(sa), &as_function(sb), a.system, st),
    }
}

fn sequence_inclusion(m: &LogSequence, n: &LogSequence, system: SystemKind, st: &DecisionSettings) -> Result<Decision> {
    let th = &st.thresholds;
    let mut notes = Vec::new();
    let mut d = match system {
        SystemKind::Single => {
            let (m, n) = (log_convex_rep(m, &mut notes), log_convex_rep(n, &mut notes));
            Decision::new(
                check_strong_dom_with(&m, &n, th)?,
                rules::SINGLE_SEQUENCE,
                "N_j <= A M_j",
            )
        }
        s if s.is_dilatation() => {
            let (m, n) = (log_convex_rep(m, &mut notes), log_convex_rep(n, &mut notes));
            Decision::new(check_preceq_with(&n, &m, th)?, rules::DILATATION_SEQUENCE, "N preceq M")
        }
        _ => {
            let (m, n) = (lc_rep(m, &mut notes)?, lc_rep(n, &mut notes)?);
            Decision::new(
                check_tilde_dom_with(&m, &n, th)?,
                rules::EXPONENTIAL_SEQUENCE,
                "N_j <= A (M_{cj})^{1/c}, c in {1,2,4,8}",
            )
        }
    };
    d.verdict.notes.extend(notes);
    Ok(d)
}

/// Associated sequences of both weights on a common horizon.
fn common_assoc(u: &Weight, w: &Weight, st: &DecisionSettings) -> Result<(LogSequence, LogSequence)> {
    let h = u.assoc_horizon(w.assoc_horizon(st.horizon));
    Ok((assoc_sequence(u, h)?, assoc_sequence(w, h)?))
}

/// Grid inside the domains of `ω_{M^u}` and of `w`.
fn function_grid(u: &Weight, w: &Weight, st: &DecisionSettings) -> Result<GridSpec> {
    let h = u.assoc_horizon(w.assoc_horizon(st.horizon));
    u.default_grid(h, st.grid_points)?.clamp_hi(0.9 * w.domain_end())
}

fn function_inclusion(u: &Weight, w: &Weight, system: SystemKind, st: &DecisionSettings) -> Result<Decision> {
    let th = &st.thresholds;
    match system {
        SystemKind::Single => {
            let h = u.assoc_horizon(st.horizon);
            let mu = assoc_sequence(u, h)?;
            let vmu = Weight::v_m(&mu);
            let grid = function_grid(u, w, st)?;
            let mut v = check_weight_relation_with(&vmu, w, RelationKind::Plain, &grid, th)?;
            v.notes
                .push("associated weight of u bracketed by v_{M^u} within factor 6".into());
            Ok(Decision::new(v, rules::SINGLE_FUNCTION, "w = O(v_{M^u})"))
        }
        s if s.is_dilatation() => {
            if !u.is_convex() {
                return Err(Error::PrerequisiteNotMet(
                    "dilatation case needs a convex left weight".into(),
                ));
            }
            if !u.has_moderate_growth() && !w.has_moderate_growth() {
                return Err(Error::PrerequisiteNotMet(
                    "dilatation case needs one weight of moderate growth".into(),
                ));
            }
            if w.is_convex() {
                let (mu, mw) = common_assoc(u, w, st)?;
                let v = check_preceq_with(&mw, &mu, th)?;
                Ok(Decision::new(v, rules::DILATATION_FUNCTION, "M^w preceq M^u"))
            } else {
                let grid = function_grid(u, w, st)?;
                let v = check_weight_relation_with(u, w, RelationKind::Dilatation, &grid, th)?;
                Ok(Decision::new(v, rules::DILATATION_FUNCTION_DIRECT, "w(ct) = O(u(t))"))
            }
        }
        _ => {
            if !u.is_normalized() || !w.is_normalized() {
                return Err(Error::PrerequisiteNotMet(
                    "exponential systems need normalized weights".into(),
                ));
            }
            if !u.is_convex() {
                return Err(Error::PrerequisiteNotMet(
                    "exponential case needs a convex left weight".into(),
                ));
            }
            if w.is_convex() {
                let (mu, mw) = common_assoc(u, w, st)?;
                let v = check_tilde_dom_with(&mu, &mw, th)?;
                Ok(Decision::new(
                    v,
                    rules::EXPONENTIAL_FUNCTION,
                    "M^w_j <= A (M^u_{cj})^{1/c}, c in {1,2,4,8}",
                ))
            } else {
                let grid = function_grid(u, w, st)?;
                let v = check_weight_relation_with(u, w, RelationKind::Exponential, &grid, th)?;
                Ok(Decision::new(v, rules::EXPONENTIAL_FUNCTION_DIRECT, "w^c = O(u)"))
            }
        }
    }
}

pub fn decide_equality(a: &SpaceSpec, b: &SpaceSpec) -> Result<Decision> {
    decide_equality_with(a, b, &DecisionSettings::default())
}

/// Both inclusions. The combined status does not depend on the argument
/// order: a refutation outranks divergence, which outranks bounded.
pub fn decide_equality_with(a: &SpaceSpec, b: &SpaceSpec, st: &DecisionSettings) -> Result<Decision> {
    let fwd = decide_inclusion_with(a, b, st)?;
    let back = decide_inclusion_with(b, a, st)?;
    let rank = |s: &Status| match s {
        Status::Refuted { .. } => 3,
        Status::DivergesOnHorizon => 2,
        Status::HoldsOnHorizon => 1,
        Status::Proved => 0,
    };
    let lead = if rank(&back.verdict.status) > rank(&fwd.verdict.status) {
        &back
    } else {
        &fwd
    };
    let mut v = Verdict::new(
        lead.verdict.status,
        lead.verdict.trend,
        fwd.verdict.horizon_used.min(back.verdict.horizon_used),
    );
    for (k, x) in &fwd.verdict.witness_constants {
        v.witness_constants.insert(format!("{k}_forward"), *x);
    }
    for (k, x) in &back.verdict.witness_constants {
        v.witness_constants.insert(format!("{k}_reverse"), *x);
    }
    v.notes.extend(fwd.verdict.notes.iter().cloned());
    for n in &back.verdict.notes {
        if !v.notes.contains(n) {
            v.notes.push(n.clone());
        }
    }
    let condition = format!("{} (both directions)", fwd.condition);
    Ok(Decision::new(v, &fwd.rule, &condition))
}

pub fn decide_mult_closure(a: &SpaceSpec) -> Result<Decision> {
    decide_mult_closure_with(a, &DecisionSettings::default())
}

/// Whether the space is closed under pointwise multiplication.
pub fn decide_mult_closure_with(a: &SpaceSpec, st: &DecisionSettings) -> Result<Decision> {
    let horizon = match &a.source {
        WeightSource::Sequence(m) => m.horizon() as f64,
        WeightSource::Function(_) => st.horizon as f64,
    };
    match a.system {
        SystemKind::Single => Ok(Decision::new(
            Verdict::new(Status::Refuted { witness: Witness::Rule }, 0.0, horizon),
            rules::CLOSURE_SINGLE,
            "f^2 in H_v for all f in H_v",
        )),
        s if s.is_exponential() => Ok(Decision::new(
            Verdict::new(Status::Proved, 0.0, horizon).with_constant("c", 2.0),
            rules::CLOSURE_EXPONENTIAL,
            "v^c * v^d = v^{c+d}",
        )),
        _ => match &a.source {
            WeightSource::Sequence(m) => {
                let mut notes = Vec::new();
                let m = log_convex_rep(m, &mut notes);
                let mut v = check_mg_with(&m, &st.thresholds)?;
                let landing = convolve(&m, &m)?;
                let numeric = Thresholds {
                    use_rule_table: false,
                    ..st.thresholds
                };
                let bridge = check_preceq_with(&m, &landing, &numeric)?;
                if let Some(h) = bridge.constant("H") {
                    v.witness_constants.insert("H".into(), h);
                }
                if bridge.holds() != v.holds() {
                    v.notes
                        .push(format!("M preceq M*M classifies as {}", bridge.status.label()));
                }
                v.notes.extend(notes);
                let mut d = Decision::new(v, rules::CLOSURE_DILATATION_SEQUENCE, "M has (mg)");
                d.landing = Some(landing);
                Ok(d)
            }
            WeightSource::Function(u) => {
                if !u.is_normalized() || !u.is_convex() {
                    return Err(Error::PrerequisiteNotMet(
                        "closure for weight functions needs a normalized convex weight".into(),
                    ));
                }
                let h = u.assoc_horizon(st.horizon);
                let grid = u.default_grid(h, st.grid_points)?;
                let report = check_weight_condition_with(u, WeightCondition::Om6, &grid, h, &st.thresholds)?;
                let mut v = report.verdict;
                if let (Some(false), Some(c)) = (report.agrees, &report.cross_check) {
                    v.notes.push(format!("(mg) for M^u classifies as {}", c.status.label()));
                }
                Ok(Decision::new(
                    v,
                    rules::CLOSURE_DILATATION_FUNCTION,
                    "u(Ht) <= e^H u(t)^2",
                ))
            }
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaKind {
    /// `Σ (cz)^j / (2^j M_j)`.
    Dilated(f64),
    /// `Σ z^{cj} / (2^j M_j^c)`.
    Powered(usize),
}

/// The test functions `θ_{M,c}` and `θ^c_M` restricted to `t ≥ 0`.
#[derive(Debug, Clone)]
pub struct ThetaFunction {
    sequence: LogSequence,
    kind: ThetaKind,
    omega: OmegaEvaluator,
}

/// `log θ(t)` with the truncation used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaValue {
    pub log_value: f64,
    /// Last index summed.
    pub truncated_at: usize,
    /// Bound on `log(θ / partial sum)`.
    pub log_error_bound: f64,
}

impl ThetaFunction {
    pub fn new(m: &LogSequence, kind: ThetaKind) -> Result<Self> {
        match kind {
            ThetaKind::Dilated(c) if !(c > 0.0 && c.is_finite()) => {
                return Err(Error::InvalidParameter(format!("theta dilation c = {c} must be > 0")));
            }
            ThetaKind::Powered(0) => {
                return Err(Error::InvalidParameter("theta power c must be >= 1".into()));
            }
            _ => {}
        }
        Ok(ThetaFunction {
            sequence: m.clone(),
            kind,
            omega: OmegaEvaluator::new(m),
        })
    }

    pub fn kind(&self) -> ThetaKind {
        self.kind
    }

    pub fn sequence(&self) -> &LogSequence {
        &self.sequence
    }

    /// The argument handed to `ω` by the upper bound; must stay below `μ_J`.
    fn omega_argument(&self, t: f64) -> f64 {
        match self.kind {
            ThetaKind::Dilated(c) => c * t,
            ThetaKind::Powered(_) => t,
        }
    }

    /// Multiplier and log-argument so that `log term_j = p (j x − ℓ_j)`.
    fn term_parameters(&self, t: f64) -> (f64, f64) {
        match self.kind {
            ThetaKind::Dilated(c) => (1.0, (c * t / 2.0).ln()),
            ThetaKind::Powered(c) => {
                let p = c as f64;
                (p, t.ln() - 2f64.ln() / p)
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<ThetaValue> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("argument t = {t} must be >= 0")));
        }
        // domain check through ω
        self.omega.omega(self.omega_argument(t))?;
        let (p, x) = self.term_parameters(t);
        let m = &self.sequence;
        if t == 0.0 {
            return Ok(ThetaValue {
                log_value: -p * m.log_value(0),
                truncated_at: 0,
                log_error_bound: 0.0,
            });
        }
        let term = |j: usize| p * (j as f64 * x - m.log_value(j));
        let convex = m.is_log_convex();
        let mut terms = Vec::with_capacity(m.horizon() + 1);
        let mut max = f64::NEG_INFINITY;
        let mut tail = f64::NEG_INFINITY;
        for j in 0..=m.horizon() {
            let a = term(j);
            max = max.max(a);
            terms.push(a);
            let falling = j > 0 && a < terms[j - 1];
            if convex && falling && a < max - THETA_TRUNCATION && j < m.horizon() {
                // log-concave terms: the rest is dominated by a geometric series
                let log_r = term(j + 1) - a;
                tail = a + log_r - (-log_r.exp()).ln_1p();
                break;
            }
        }
        let sum: f64 = terms.iter().map(|a| (a - max).exp()).sum();
        let log_value = max + sum.ln();
        let log_error_bound = if tail.is_finite() {
            (tail - log_value).exp().ln_1p()
        } else {
            0.0
        };
        Ok(ThetaValue {
            log_value,
            truncated_at: terms.len() - 1,
            log_error_bound,
        })
    }

    /// `ω_M(ct/2)` resp. `c ω_M(t/2^{1/c})`.
    pub fn lower_bound(&self, t: f64) -> Result<f64> {
        match self.kind {
            ThetaKind::Dilated(c) => self.omega.omega(c * t / 2.0),
            ThetaKind::Powered(c) => {
                let p = c as f64;
                Ok(p * self.omega.omega(t / 2f64.powf(1.0 / p))?)
            }
        }
    }

    /// `log 2 + ω_M(ct)` resp. `log 2 + c ω_M(t)`.
    pub fn upper_bound(&self, t: f64) -> Result<f64> {
        let w = self.omega.omega(self.omega_argument(t))?;
        let p = match self.kind {
            ThetaKind::Dilated(_) => 1.0,
            ThetaKind::Powered(c) => c as f64,
        };
        Ok(2f64.ln() + p * w)
    }
}

/// `log θ(t)`.
pub fn theta_eval(theta: &ThetaFunction, t: f64) -> Result<f64> {
    Ok(theta.eval(t)?.log_value)
}

/// Grid supremum of `log(Σ |a_j| t^j) + log v(t)`, with `coeffs[j] = log |a_j|`
/// (`−∞` for a zero coefficient). The zero polynomial gives `−∞`.
pub fn poly_norm(coeffs: &[f64], v: &Weight, grid: &GridSpec) -> Result<f64> {
    let nonzero: Vec<(usize, f64)> = coeffs
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| *a > f64::NEG_INFINITY)
        .collect();
    if nonzero.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    if let Some((j, _)) = nonzero.iter().find(|(_, a)| !a.is_finite()) {
        return Err(Error::NonFinite(format!("coefficient {j}")));
    }
    let mut best = f64::NEG_INFINITY;
    for t in grid.abscissae() {
        let lt = t.ln();
        let logs: Vec<f64> = nonzero.iter().map(|&(j, a)| a + j as f64 * lt).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
        best = best.max(lse + v.log_v(t)?);
    }
    Ok(best)
}
