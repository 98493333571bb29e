//! Grid checks on weight functions: growth relations between two weights,
//! the single-weight conditions, and the essentiality diagnostics built on
//! `v_{M^u}`.

use serde::{Deserialize, Serialize};

use crate::curve::{CurveSample, GridSpec};
use crate::error::{Error, Result};
use crate::omega::OmegaEvaluator;
use crate::relations::{check_mg_with, check_om1_char_with};
use crate::sequence::LogSequence;
use crate::trend::{tail_slope_by_abscissa, Thresholds};
use crate::verdict::{Status, Verdict, Witness};
use crate::weight::{assoc_sequence, SequenceMode, Weight};

/// Parameters `1, 2, 4, …, 2^10` tried for dilatation and exponential relations.
pub const PARAMETER_SEARCH: [f64; 11] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];

/// Fewest grid points a restricted search step may use.
const MIN_POINTS: usize = 8;

/// Horizon and grid size used when a flag has to be derived numerically.
const FLAG_HORIZON: usize = 512;
const FLAG_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `u ≼ w`: `w = O(u)`.
    Plain,
    /// `u ≼_𝔠 w`: `u ≼ w(c·)` for some `c ≥ 1`.
    Dilatation,
    /// `u ≼^𝔠 w`: `u ≼ w^c` for some `c ≥ 1`.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightCondition {
    /// `log t = o(ω^v(t))`.
    Om3,
    /// `s ↦ ω^v(e^s)` convex.
    Convexity,
    /// `u(Ht) ≤ e^H u(t)²` (moderate growth).
    Om6,
    /// `v(t)^L ≤ e^L v(2t)`.
    Om1,
}

/// A condition verdict plus, where the condition has a sequence-side
/// counterpart, the verdict for `M^v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub verdict: Verdict,
    pub cross_check: Option<Verdict>,
    /// Whether both verdicts have the same polarity.
    pub agrees: Option<bool>,
}

fn argmax(ys: &[f64]) -> (usize, f64) {
    ys.iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

/// Sampled upper bound of a statistic: bounded iff its tail trend is.
fn bounded_statistic(ts: &[f64], ys: &[f64], th: &Thresholds) -> (bool, f64, usize, f64) {
    let (i, max) = argmax(ys);
    let trend = tail_slope_by_abscissa(ts, ys);
    (th.is_bounded(trend), max, i, trend)
}

pub fn check_weight_relation(u: &Weight, w: &Weight, kind: RelationKind, grid: &GridSpec) -> Result<Verdict> {
    check_weight_relation_with(u, w, kind, grid, &Thresholds::default())
}

/// `log w − log u` (plain), `log w(ct) − log u(t)` (dilatation) or
/// `c log w(t) − log u(t)` (exponential), searched over [`PARAMETER_SEARCH`].
pub fn check_weight_relation_with(
    u: &Weight,
    w: &Weight,
    kind: RelationKind,
    grid: &GridSpec,
    th: &Thresholds,
) -> Result<Verdict> {
    let params: &[f64] = match kind {
        RelationKind::Plain => &PARAMETER_SEARCH[..1],
        _ => &PARAMETER_SEARCH,
    };
    let all = grid.abscissae();
    let mut last: Option<(f64, f64, f64, f64, usize)> = None;
    for &c in params {
        let ts: Vec<f64> = match kind {
            RelationKind::Dilatation => all.iter().copied().filter(|t| c * t <= w.domain_end()).collect(),
            _ => all.clone(),
        };
        if ts.len() < MIN_POINTS {
            break;
        }
        let ys = ts
            .iter()
            .map(|&t| {
                let lw = match kind {
                    RelationKind::Dilatation => w.log_v(c * t)?,
                    RelationKind::Exponential => c * w.log_v(t)?,
                    RelationKind::Plain => w.log_v(t)?,
                };
                Ok(lw - u.log_v(t)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let (bounded, max, i, trend) = bounded_statistic(&ts, &ys, th);
        if bounded {
            return Ok(Verdict::new(Status::HoldsOnHorizon, trend, ts[ts.len() - 1])
                .with_constant("c", c)
                .with_constant("bound", max)
                .with_constant("C", max.exp()));
        }
        last = Some((c, max, trend, ts[i], ts.len()));
    }
    let (c, max, trend, _, _) =
        last.ok_or_else(|| Error::InvalidParameter("grid has too few points inside the weight domains".into()))?;
    Ok(Verdict::new(Status::DivergesOnHorizon, trend, grid.hi)
        .with_constant("c", c)
        .with_constant("bound", max))
}

pub fn check_weight_condition(
    v: &Weight,
    cond: WeightCondition,
    grid: &GridSpec,
    horizon: usize,
) -> Result<ConditionReport> {
    check_weight_condition_with(v, cond, grid, horizon, &Thresholds::default())
}

/// Grid check of a weight condition. For (ω_6) and (ω_1) on a convex weight
/// the sequence-side counterpart on `M^v` is evaluated as well.
pub fn check_weight_condition_with(
    v: &Weight,
    cond: WeightCondition,
    grid: &GridSpec,
    horizon: usize,
    th: &Thresholds,
) -> Result<ConditionReport> {
    let verdict = match cond {
        WeightCondition::Om3 => om3_check(v, grid, th)?,
        WeightCondition::Convexity => convexity_check(v, grid)?,
        WeightCondition::Om6 => om6_check(v, grid)?,
        WeightCondition::Om1 => om1_check(v, grid)?,
    };
    let cross_check = match cond {
        WeightCondition::Om6 | WeightCondition::Om1 if v.is_convex() => {
            let m = assoc_sequence(v, v.assoc_horizon(horizon))?;
            let numeric = Thresholds {
                use_rule_table: false,
                ..*th
            };
            if cond == WeightCondition::Om6 {
                Some(check_mg_with(&m, &numeric)?)
            } else {
                match check_om1_char_with(&m, &numeric) {
                    Ok(x) => Some(x),
                    Err(Error::NotLC) => None,
                    Err(e) => return Err(e),
                }
            }
        }
        _ => None,
    };
    let agrees = cross_check.as_ref().map(|c| c.holds() == verdict.holds());
    Ok(ConditionReport {
        verdict,
        cross_check,
        agrees,
    })
}

fn om3_check(v: &Weight, grid: &GridSpec, th: &Thresholds) -> Result<Verdict> {
    let (ts, ys): (Vec<f64>, Vec<f64>) = grid
        .abscissae()
        .into_iter()
        .filter(|t| t.ln() > 1.0)
        .map(|t| Ok((t, v.omega_v(t)? / t.ln())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    if ts.len() < MIN_POINTS {
        return Err(Error::InvalidParameter(
            "(ω_3) check needs grid points beyond t = e".into(),
        ));
    }
    let trend = tail_slope_by_abscissa(&ts, &ys);
    let last = ts[ts.len() - 1];
    let status = if trend > th.trend {
        Status::HoldsOnHorizon
    } else {
        Status::Refuted {
            witness: Witness::Abscissa(last),
        }
    };
    Ok(Verdict::new(status, trend, last).with_constant("ratio", ys[ys.len() - 1]))
}

fn convexity_check(v: &Weight, grid: &GridSpec) -> Result<Verdict> {
    let (a, b) = (grid.lo.ln(), grid.hi.ln());
    let n = grid.points.max(3);
    let ss: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let phi = ss.iter().map(|&s| v.omega_v(s.exp())).collect::<Result<Vec<_>>>()?;
    let mut worst = (0usize, 0.0f64);
    for i in 1..n - 1 {
        let d2 = phi[i + 1] - 2.0 * phi[i] + phi[i - 1];
        let tol = 1e-9 * (1.0 + phi[i].abs());
        if d2 < -tol && d2 < worst.1 {
            worst = (i, d2);
        }
    }
    let status = if worst.1 < 0.0 {
        Status::Refuted {
            witness: Witness::Abscissa(ss[worst.0].exp()),
        }
    } else {
        Status::HoldsOnHorizon
    };
    Ok(Verdict::new(status, 0.0, grid.hi).with_constant("min_second_difference", worst.1))
}

/// Grid points `t` with `factor·t` inside the domain of `v`.
fn restricted(v: &Weight, grid: &GridSpec, factor: f64) -> Vec<f64> {
    grid.abscissae()
        .into_iter()
        .filter(|t| factor * t <= v.domain_end())
        .collect()
}

/// `max_t (2ω(t) − ω(Ht)) ≤ H` for some `H ∈ {2, …, 2^10}`.
pub(crate) fn om6_check(v: &Weight, grid: &GridSpec) -> Result<Verdict> {
    let mut last = None;
    for &h in &PARAMETER_SEARCH[1..] {
        let ts = restricted(v, grid, h);
        if ts.len() < MIN_POINTS {
            break;
        }
        let ys = ts
            .iter()
            .map(|&t| Ok(2.0 * v.omega_v(t)? - v.omega_v(h * t)?))
            .collect::<Result<Vec<_>>>()?;
        let (i, max) = argmax(&ys);
        let trend = tail_slope_by_abscissa(&ts, &ys);
        if max <= h {
            return Ok(Verdict::new(Status::HoldsOnHorizon, trend, ts[ts.len() - 1])
                .with_constant("H", h)
                .with_constant("max", max));
        }
        last = Some((h, max, ts[i], trend, ts[ts.len() - 1]));
    }
    let (h, max, t, trend, hi) =
        last.ok_or_else(|| Error::InvalidParameter("grid has too few points for the (ω_6) search".into()))?;
    Ok(Verdict::new(
        Status::Refuted {
            witness: Witness::Abscissa(t),
        },
        trend,
        hi,
    )
    .with_constant("H", h)
    .with_constant("max", max))
}

/// (ω_6) on the weight's default grid; used to derive the moderate-growth flag.
pub(crate) fn om6_grid_check(v: &Weight) -> Result<Verdict> {
    let grid = v.default_grid(FLAG_HORIZON, FLAG_POINTS)?;
    om6_check(v, &grid)
}

/// `max_t (ω(2t) − L ω(t) − L) ≤ 0` for some `L ∈ {2, …, 2^10}`.
fn om1_check(v: &Weight, grid: &GridSpec) -> Result<Verdict> {
    let ts = restricted(v, grid, 2.0);
    if ts.len() < MIN_POINTS {
        return Err(Error::InvalidParameter(
            "grid has too few points for the (ω_1) search".into(),
        ));
    }
    let pairs = ts
        .iter()
        .map(|&t| Ok((v.omega_v(t)?, v.omega_v(2.0 * t)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut last = None;
    for &l in &PARAMETER_SEARCH[1..] {
        let ys: Vec<f64> = pairs.iter().map(|(w1, w2)| w2 - l * w1 - l).collect();
        let (i, max) = argmax(&ys);
        let trend = tail_slope_by_abscissa(&ts, &ys);
        if max <= 0.0 {
            return Ok(Verdict::new(Status::HoldsOnHorizon, trend, ts[ts.len() - 1])
                .with_constant("L", l)
                .with_constant("max", max));
        }
        last = Some((l, max, ts[i], trend));
    }
    let (l, max, t, trend) = last.expect("search is non-empty");
    Ok(Verdict::new(
        Status::Refuted {
            witness: Witness::Abscissa(t),
        },
        trend,
        ts[ts.len() - 1],
    )
    .with_constant("L", l)
    .with_constant("max", max))
}

/// `(M^v, t, ω^v(t), ω_{M^v}(t))`.
type PairedOmegas = (LogSequence, Vec<f64>, Vec<f64>, Vec<f64>);

/// `ω^v` and `ω_{M^v}` on a grid, with the associated sequence.
fn paired_omegas(v: &Weight, horizon: usize, grid: &GridSpec) -> Result<PairedOmegas> {
    let m = assoc_sequence(v, v.assoc_horizon(horizon))?;
    let eval = OmegaEvaluator::new(&m);
    let ts = grid.abscissae();
    let mut ov = Vec::with_capacity(ts.len());
    let mut om = Vec::with_capacity(ts.len());
    for &t in &ts {
        ov.push(v.omega_v(t)?);
        om.push(eval.omega(t)?);
    }
    Ok((m, ts, ov, om))
}

/// Outcome of [`sandwich`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sandwich {
    /// `log A` with `ω^v ≤ 2ω_{M^v} + log A` on the grid.
    pub log_a: f64,
    /// `min_t (ω^v(t) − ω_{M^v}(t))`; non-negative up to slack.
    pub min_upper_gap: f64,
    pub holds: bool,
}

/// `ω_{M^v} ≤ ω^v ≤ 2ω_{M^v} + log A` on the grid.
pub fn sandwich(v: &Weight, horizon: usize, grid: &GridSpec) -> Result<Sandwich> {
    let (_, _, ov, om) = paired_omegas(v, horizon, grid)?;
    let log_a = ov.iter().zip(&om).map(|(a, b)| a - 2.0 * b).fold(0.0, f64::max);
    let min_upper_gap = ov.iter().zip(&om).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
    Ok(Sandwich {
        log_a,
        min_upper_gap,
        holds: min_upper_gap >= -Thresholds::default().slack,
    })
}

/// `gap(t) = log v_{M^u}(t) − log u(t) = ω^u(t) − ω_{M^u}(t)`.
///
/// `u` is essential iff the gap stays bounded; the verdict reports
/// `gap_sup` and `B = exp(max(gap_sup, 0))`.
pub fn essentiality_gap(u: &Weight, horizon: usize, grid: &GridSpec) -> Result<(CurveSample, Verdict)> {
    essentiality_gap_with(u, horizon, grid, &Thresholds::default())
}

pub fn essentiality_gap_with(
    u: &Weight,
    horizon: usize,
    grid: &GridSpec,
    th: &Thresholds,
) -> Result<(CurveSample, Verdict)> {
    let (_, ts, ov, om) = paired_omegas(u, horizon, grid)?;
    let gaps: Vec<f64> = ov.iter().zip(&om).map(|(a, b)| a - b).collect();
    let mut curve = CurveSample::new(u.to_string(), "gap");
    for (t, g) in ts.iter().zip(&gaps) {
        curve.push(*t, *g);
    }
    let (bounded, max, _, trend) = bounded_statistic(&ts, &gaps, th);
    let status = if bounded {
        Status::HoldsOnHorizon
    } else {
        Status::DivergesOnHorizon
    };
    let mut verdict = Verdict::new(status, trend, grid.hi)
        .with_constant("gap_sup", max)
        .with_constant("B", max.max(0.0).exp());
    let min = curve.min_value();
    if min < -th.slack {
        verdict = verdict.with_note(format!("gap dips to {min:e} below zero"));
    }
    Ok((curve, verdict))
}

/// `gap(t) + ½ log u(t) ≤ log B` on the grid.
pub fn half_power_bound(u: &Weight, horizon: usize, grid: &GridSpec) -> Result<Verdict> {
    let th = Thresholds::default();
    let (_, ts, ov, om) = paired_omegas(u, horizon, grid)?;
    let ys: Vec<f64> = ov.iter().zip(&om).map(|(a, b)| a - b - 0.5 * a).collect();
    let (bounded, max, i, trend) = bounded_statistic(&ts, &ys, &th);
    let status = if bounded {
        Status::HoldsOnHorizon
    } else {
        Status::Refuted {
            witness: Witness::Abscissa(ts[i]),
        }
    };
    Ok(Verdict::new(status, trend, grid.hi).with_constant("B", max.max(0.0).exp()))
}

/// `log v_{M^u}(t) − log u(t/H) ≤ log B` for some `H ∈ {2, …, 2^10}`.
pub fn dilated_bound(u: &Weight, horizon: usize, grid: &GridSpec) -> Result<Verdict> {
    let th = Thresholds::default();
    let (_, ts, _, om) = paired_omegas(u, horizon, grid)?;
    let mut last = None;
    for &h in &PARAMETER_SEARCH[1..] {
        let ys = ts
            .iter()
            .zip(&om)
            .map(|(&t, b)| Ok(u.omega_v(t / h)? - b))
            .collect::<Result<Vec<_>>>()?;
        let (bounded, max, _, trend) = bounded_statistic(&ts, &ys, &th);
        if bounded {
            return Ok(Verdict::new(Status::HoldsOnHorizon, trend, grid.hi)
                .with_constant("H", h)
                .with_constant("B", max.max(0.0).exp()));
        }
        last = Some((h, trend));
    }
    let (h, trend) = last.expect("search is non-empty");
    Ok(Verdict::new(Status::DivergesOnHorizon, trend, grid.hi).with_constant("H", h))
}

/// Bounds for the associated weight `ũ`: `v_{M^u}/6 ≤ ũ ≤ v_{M^u}`.
#[derive(Debug, Clone)]
pub struct AssociatedWeightBracket {
    pub lower: Weight,
    pub upper: Weight,
    pub source: Weight,
    pub sequence: LogSequence,
}

pub fn associated_weight_bracket(u: &Weight, horizon: usize) -> Result<AssociatedWeightBracket> {
    let sequence = assoc_sequence(u, u.assoc_horizon(horizon))?;
    let upper = Weight::from_sequence(&sequence, SequenceMode::Dilate(1.0))?;
    let lower = Weight::scaled(&upper, -(6f64.ln()));
    Ok(AssociatedWeightBracket {
        lower,
        upper,
        source: u.clone(),
        sequence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{gevrey, q_gevrey};

    fn grid_for(v: &Weight) -> GridSpec {
        v.default_grid(512, 64).unwrap()
    }

    #[test]
    fn identical_weights_are_related() {
        let v = Weight::v_m(&gevrey(1.0, 256).unwrap());
        for kind in [RelationKind::Plain, RelationKind::Dilatation, RelationKind::Exponential] {
            let r = check_weight_relation(&v, &v, kind, &grid_for(&v)).unwrap();
            assert!(r.holds());
            assert_eq!(r.constant("c"), Some(1.0));
            assert_eq!(r.constant("bound"), Some(0.0));
        }
    }

    #[test]
    fn sequence_weights_follow_strong_domination() {
        let m = gevrey(2.0, 512).unwrap();
        let n = gevrey(1.0, 512).unwrap();
        let (vm, vn) = (Weight::v_m(&m), Weight::v_m(&n));
        let grid = grid_for(&vn);
        let r = check_weight_relation(&vm, &vn, RelationKind::Plain, &grid).unwrap();
        assert!(r.holds());
        assert!(r.constant("bound").unwrap() <= 1e-12);
        let r = check_weight_relation(&vm, &vn, RelationKind::Exponential, &grid).unwrap();
        assert!(r.holds());
        assert_eq!(r.constant("c"), Some(1.0));
        let r = check_weight_relation(&vn, &vm, RelationKind::Plain, &grid).unwrap();
        assert_eq!(r.status, Status::DivergesOnHorizon);
    }

    #[test]
    fn dilatation_finds_the_factor() {
        let u = Weight::exp_power(2.0, 1.0).unwrap();
        let w = Weight::exp_power(1.0, 1.0).unwrap();
        let grid = GridSpec::new(0.1, 400.0, 64).unwrap();
        let r = check_weight_relation(&u, &w, RelationKind::Dilatation, &grid).unwrap();
        assert!(r.holds());
        assert_eq!(r.constant("c"), Some(2.0));
        assert!(!check_weight_relation(&u, &w, RelationKind::Plain, &grid)
            .unwrap()
            .holds());
    }

    #[test]
    fn conditions_for_exp_power() {
        let v = Weight::exp_power(1.0, 1.0).unwrap();
        let grid = GridSpec::new(0.1, 400.0, 64).unwrap();
        let r = check_weight_condition(&v, WeightCondition::Om6, &grid, 256).unwrap();
        assert!(r.verdict.holds());
        assert_eq!(r.verdict.constant("H"), Some(2.0));
        assert!(check_weight_condition(&v, WeightCondition::Om3, &grid, 256)
            .unwrap()
            .verdict
            .holds());
        assert!(check_weight_condition(&v, WeightCondition::Convexity, &grid, 256)
            .unwrap()
            .verdict
            .holds());
        assert!(check_weight_condition(&v, WeightCondition::Om1, &grid, 256)
            .unwrap()
            .verdict
            .holds());
    }

    #[test]
    fn om6_fails_for_q_gevrey() {
        let v = Weight::v_m(&q_gevrey(2.0, 512).unwrap());
        let r = check_weight_condition(&v, WeightCondition::Om6, &grid_for(&v), 512).unwrap();
        assert!(matches!(r.verdict.status, Status::Refuted { .. }));
        assert_eq!(r.agrees, Some(true));
    }

    #[test]
    fn om1_holds_for_gevrey() {
        let v = Weight::v_m(&gevrey(1.0, 512).unwrap());
        let r = check_weight_condition(&v, WeightCondition::Om1, &grid_for(&v), 512).unwrap();
        assert!(r.verdict.holds());
        assert_eq!(r.agrees, Some(true));
    }

    #[test]
    fn v_m_is_essential() {
        let v = Weight::v_m(&gevrey(1.0, 512).unwrap());
        let (curve, verdict) = essentiality_gap(&v, 512, &grid_for(&v)).unwrap();
        assert!(verdict.holds());
        assert!(curve.max_value() <= 1e-6);
        let s = sandwich(&v, 512, &grid_for(&v)).unwrap();
        assert!(s.holds);
    }

    #[test]
    fn exp_weight_is_essential() {
        // M^u_j = (j/e)^j and ω_{M^u}(t) = t whenever t is an integer.
        let u = Weight::exp_power(1.0, 1.0).unwrap();
        let grid = grid_for(&u);
        let (curve, gap) = essentiality_gap(&u, 512, &grid).unwrap();
        assert_eq!(gap.status, Status::HoldsOnHorizon);
        assert!(curve.min_value() >= -1e-9);
        assert!(gap.constant("gap_sup").unwrap() < 0.5);
        let h = half_power_bound(&u, 512, &grid).unwrap();
        assert!(h.holds());
        assert!(h.trend < 0.0);
        let d = dilated_bound(&u, 512, &grid).unwrap();
        assert!(d.holds());
        assert_eq!(d.constant("H"), Some(2.0));
    }

    #[test]
    fn bracket_has_ratio_six() {
        let u = Weight::exp_power(1.0, 1.0).unwrap();
        let b = associated_weight_bracket(&u, 256).unwrap();
        let grid = u.default_grid(256, 32).unwrap();
        for t in grid.abscissae() {
            let (lo, hi) = (b.lower.log_v(t).unwrap(), b.upper.log_v(t).unwrap());
            assert!((hi - lo - 6f64.ln()).abs() < 1e-12);
            assert!(hi >= u.log_v(t).unwrap() - 1e-9);
        }
    }
}
