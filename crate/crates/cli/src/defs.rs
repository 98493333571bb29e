//! Definition files and name resolution.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use wcalc_core::{
    make_sequence, normalize, FamilySpec, LogSequence, SequenceMode, SpaceSpec, SystemKind, Thresholds, Weight,
    WeightFlags, WeightSource,
};

pub const SCHEMA_VERSION: u32 = 1;

const MAX_NESTING: usize = 32;

/// Global settings embedded in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub horizon: usize,
    pub grid_points: usize,
    pub thresholds: Thresholds,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            horizon: 512,
            grid_points: 64,
            thresholds: Thresholds::default(),
        }
    }
}

impl Settings {
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(8..=1 << 16).contains(&self.horizon) {
            bail!("horizon {} outside 8..=65536", self.horizon);
        }
        if !(8..=1 << 16).contains(&self.grid_points) {
            bail!("grid size {} outside 8..=65536", self.grid_points);
        }
        let th = &self.thresholds;
        if !(th.trend > 0.0 && th.om1_margin > 0.0 && th.divergence > 0.0 && th.slack >= 0.0) {
            bail!("thresholds must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceDef {
    #[serde(flatten)]
    pub family: FamilySpec,
    /// Defaults to the global horizon; ignored for tables.
    #[serde(default)]
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WeightKindDef {
    ExpPower {
        a: f64,
        b: f64,
    },
    FromSequence {
        sequence: String,
        #[serde(default = "default_mode")]
        mode: SequenceMode,
    },
    /// `(t, log v(t))` knots.
    Table {
        points: Vec<(f64, f64)>,
    },
    Normalized {
        weight: String,
    },
    Product {
        left: String,
        right: String,
    },
}

fn default_mode() -> SequenceMode {
    SequenceMode::Dilate(1.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightDef {
    #[serde(flatten)]
    pub kind: WeightKindDef,
    #[serde(default)]
    pub flags: WeightFlags,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDef {
    pub source: String,
    pub system: SystemKind,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinitionFile {
    pub schema_version: u32,
    #[serde(default)]
    pub settings: Option<Settings>,
    #[serde(default)]
    pub sequences: BTreeMap<String, SequenceDef>,
    #[serde(default)]
    pub weights: BTreeMap<String, WeightDef>,
    #[serde(default)]
    pub spaces: BTreeMap<String, SpaceDef>,
}

impl DefinitionFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let defs: DefinitionFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if defs.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                defs.schema_version
            );
        }
        for name in defs.weights.keys().chain(defs.spaces.keys()) {
            if defs.sequences.contains_key(name) {
                bail!("name '{name}' is defined twice");
            }
        }
        for name in defs.spaces.keys() {
            if defs.weights.contains_key(name) {
                bail!("name '{name}' is defined twice");
            }
        }
        Ok(defs)
    }
}

/// A resolved weight source: a sequence or a weight function.
pub enum Source {
    Sequence(LogSequence),
    Weight(Weight),
}

pub struct Resolver<'a> {
    pub defs: &'a DefinitionFile,
    pub settings: Settings,
}

fn parse_num(s: &str, what: &str) -> anyhow::Result<f64> {
    s.parse::<f64>().map_err(|_| anyhow!("invalid {what} '{s}'"))
}

impl<'a> Resolver<'a> {
    pub fn new(defs: &'a DefinitionFile, settings: Settings) -> Self {
        Resolver { defs, settings }
    }

    fn builtin_sequence(&self, name: &str) -> anyhow::Result<Option<LogSequence>> {
        let family = match name {
            "gevrey1" => FamilySpec::Gevrey { s: 1.0 },
            "gevrey2" => FamilySpec::Gevrey { s: 2.0 },
            "gevrey3" => FamilySpec::Gevrey { s: 3.0 },
            "qgevrey2" => FamilySpec::QGevrey { q: 2.0 },
            _ => {
                if let Some(s) = name.strip_prefix("gevrey:") {
                    FamilySpec::Gevrey {
                        s: parse_num(s, "Gevrey exponent")?,
                    }
                } else if let Some(q) = name.strip_prefix("qgevrey:") {
                    FamilySpec::QGevrey {
                        q: parse_num(q, "q-Gevrey base")?,
                    }
                } else {
                    return Ok(None);
                }
            }
        };
        Ok(Some(make_sequence(&family, self.settings.horizon)?))
    }

    fn builtin_weight(&self, name: &str) -> anyhow::Result<Option<Weight>> {
        let Some(args) = name.strip_prefix("exppower:") else {
            return Ok(None);
        };
        let (a, b) = args
            .split_once(',')
            .ok_or_else(|| anyhow!("expected exppower:a,b, got '{name}'"))?;
        Ok(Some(Weight::exp_power(parse_num(a, "a")?, parse_num(b, "b")?)?))
    }

    pub fn sequence(&self, name: &str) -> anyhow::Result<LogSequence> {
        if let Some(def) = self.defs.sequences.get(name) {
            let horizon = def.horizon.unwrap_or(self.settings.horizon);
            return make_sequence(&def.family, horizon).with_context(|| format!("sequence '{name}'"));
        }
        self.builtin_sequence(name)?
            .ok_or_else(|| anyhow!("unknown sequence '{name}'"))
    }

    pub fn weight(&self, name: &str) -> anyhow::Result<Weight> {
        self.weight_at(name, 0)
    }

    fn weight_at(&self, name: &str, depth: usize) -> anyhow::Result<Weight> {
        match self.source_at(name, depth)? {
            Source::Weight(w) => Ok(w),
            Source::Sequence(m) => Ok(Weight::v_m(&m)),
        }
    }

    /// Looks `name` up among sequences, weights and builtins, in that order.
    pub fn source(&self, name: &str) -> anyhow::Result<Source> {
        self.source_at(name, 0)
    }

    fn source_at(&self, name: &str, depth: usize) -> anyhow::Result<Source> {
        if depth > MAX_NESTING {
            bail!("weight definitions nested deeper than {MAX_NESTING} (cycle through '{name}'?)");
        }
        if self.defs.sequences.contains_key(name) {
            return Ok(Source::Sequence(self.sequence(name)?));
        }
        if let Some(def) = self.defs.weights.get(name) {
            let w = match &def.kind {
                WeightKindDef::ExpPower { a, b } => Weight::exp_power(*a, *b)?,
                WeightKindDef::FromSequence { sequence, mode } => {
                    Weight::from_sequence(&self.sequence(sequence)?, *mode)?
                }
                WeightKindDef::Table { points } => Weight::table(points)?,
                WeightKindDef::Normalized { weight } => normalize(&self.weight_at(weight, depth + 1)?),
                WeightKindDef::Product { left, right } => {
                    Weight::product(&self.weight_at(left, depth + 1)?, &self.weight_at(right, depth + 1)?)
                }
            };
            return Ok(Source::Weight(w.with_flags(def.flags)));
        }
        if let Some(m) = self.builtin_sequence(name)? {
            return Ok(Source::Sequence(m));
        }
        if let Some(w) = self.builtin_weight(name)? {
            return Ok(Source::Weight(w));
        }
        bail!("unknown name '{name}'")
    }

    /// A defined space name, or `<system>:<source>`.
    pub fn space(&self, spec: &str) -> anyhow::Result<SpaceSpec> {
        if let Some(def) = self.defs.spaces.get(spec) {
            return self.space_from(def.system, &def.source);
        }
        let (system, source) = spec
            .split_once(':')
            .ok_or_else(|| anyhow!("unknown space '{spec}' (expected a defined space or <system>:<source>)"))?;
        self.space_from(system.parse()?, source)
    }

    pub fn space_from(&self, system: SystemKind, source: &str) -> anyhow::Result<SpaceSpec> {
        let source = match self.source(source)? {
            Source::Sequence(m) => WeightSource::Sequence(m),
            Source::Weight(w) => WeightSource::Function(w),
        };
        Ok(SpaceSpec { source, system })
    }
}
