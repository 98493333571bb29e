//! Outcome records for finite-horizon relation and condition checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Where a refutation can be reproduced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Sequence index.
    Index(usize),
    /// Point on the radial axis.
    Abscissa(f64),
    /// Refuted by a structural rule, no numeric counterexample involved.
    Rule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Status {
    /// Established by the closed-form rule table.
    Proved,
    /// Bounded on the stored horizon.
    HoldsOnHorizon,
    /// Fails; the witness locates the violation.
    Refuted { witness: Witness },
    /// The tail trend of the statistic exceeds the divergence threshold.
    DivergesOnHorizon,
}

impl Status {
    pub fn holds(&self) -> bool {
        matches!(self, Status::Proved | Status::HoldsOnHorizon)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::HoldsOnHorizon => "holds-on-horizon",
            Status::Refuted { .. } => "refuted",
            Status::DivergesOnHorizon => "diverges-on-horizon",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness_constants: BTreeMap<String, f64>,
    pub trend: f64,
    pub horizon_used: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn new(status: Status, trend: f64, horizon_used: f64) -> Self {
        Verdict {
            status,
            witness_constants: BTreeMap::new(),
            trend,
            horizon_used,
            notes: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.status.holds()
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.witness_constants.insert(name.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.witness_constants.get(name).copied()
    }
}
