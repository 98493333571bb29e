//! Weight sequences, associated weight functions and decision procedures for
//! weighted spaces of entire functions.
//!
//! Sequences are stored as log-values ([`LogSequence`]); relations between
//! them and growth conditions are evaluated on a finite horizon and reported
//! as [`Verdict`]s.

// `!(x >= 0.0)` style guards reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod omega;
pub mod relations;
pub mod sequence;
pub mod spaces;
pub mod trend;
pub mod verdict;
pub mod weight;
pub mod weight_checks;

pub use curve::{CurveSample, GridSpec};
pub use error::{Error, Result};
pub use omega::{omega_brute_force, underline, underline_to, OmegaEvaluator};
pub use relations::{
    check_approx, check_approx_with, check_mg, check_mg_with, check_om1_char, check_om1_char_with, check_preceq,
    check_preceq_with, check_strong_dom, check_strong_dom_with, check_tilde_dom, check_tilde_dom_with,
};
pub use sequence::{
    convolve, convolve_by_min, convolve_detailed, gevrey, lc_minorant, lc_normalize, make_sequence, q_gevrey, scale,
    tilde, tilde_to, truncate, Construction, Convolution, Family, FamilySpec, LcNormalization, LogSequence,
    SequenceFlags,
};
pub use spaces::{
    decide_equality, decide_equality_with, decide_inclusion, decide_inclusion_with, decide_mult_closure,
    decide_mult_closure_with, poly_norm, theta_eval, Decision, DecisionSettings, SpaceSpec, SystemKind, ThetaFunction,
    ThetaKind, ThetaValue, WeightSource,
};
pub use trend::Thresholds;
pub use verdict::{Status, Verdict, Witness};
pub use weight::{
    assoc_sequence, monomial_norm, normalization_constant, normalize, p_function, SequenceMode, Weight, WeightFlags,
    WeightKind,
};
pub use weight_checks::{
    associated_weight_bracket, check_weight_condition, check_weight_condition_with, check_weight_relation,
    check_weight_relation_with, dilated_bound, essentiality_gap, essentiality_gap_with, half_power_bound, sandwich,
    AssociatedWeightBracket, ConditionReport, RelationKind, Sandwich, WeightCondition,
};
