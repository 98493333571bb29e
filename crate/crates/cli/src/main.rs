//! `wcalc`: weight sequences, associated weight functions and weighted spaces
//! of entire functions from the command line.

mod defs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use wcalc_core::{
    assoc_sequence, check_mg_with, check_om1_char_with, check_weight_relation_with, convolve, decide_equality_with,
    decide_inclusion_with, decide_mult_closure_with, Decision, DecisionSettings, Error, GridSpec, LogSequence,
    OmegaEvaluator, RelationKind, SystemKind, Verdict,
};

use defs::{DefinitionFile, Resolver, Settings, Source, SCHEMA_VERSION};
use output::{sequence_csv, verdict_rows_csv, Format};

#[derive(Debug, Parser)]
#[command(
    name = "wcalc",
    version,
    about = "Weight sequences and weighted spaces of entire functions"
)]
struct Cli {
    /// JSON definition file with named sequences, weights and spaces.
    #[arg(long, global = true)]
    defs: Option<PathBuf>,

    /// Horizon J for builtin sequences and associated sequences.
    #[arg(long, global = true)]
    horizon: Option<usize>,

    /// Number of grid points for weight checks and curves.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SeqCheck {
    Logconvex,
    Lc,
    Mg,
    Om1char,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CompareKind {
    Plain,
    Dilatation,
    Exponential,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Flags and growth conditions of a sequence.
    Seq {
        name: String,
        /// Checks to run; all of them by default.
        #[arg(long = "check", value_enum)]
        checks: Vec<SeqCheck>,
    },
    /// Sample the associated weight function (ω_M, or −log v for a weight).
    Omega {
        name: String,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
    },
    /// Associated sequence `M^v_j = sup_t t^j v(t)` of a weight.
    Assoc { name: String },
    /// Growth relation between two weights.
    Compare {
        u: String,
        w: String,
        #[arg(long, value_enum, default_value = "plain")]
        kind: CompareKind,
    },
    /// Inclusion (or equality) of two spaces, each a defined space or `<system>:<source>`.
    Include {
        a: String,
        b: String,
        #[arg(long)]
        equality: bool,
    },
    /// Closure under pointwise multiplication: a defined space, `<system>:<source>` or `<system> <source>`.
    Closure {
        #[arg(num_args = 1..=2, required = true)]
        spec: Vec<String>,
    },
    /// Convolved sequence `M ⋆ N`.
    Convolve { a: String, b: String },
    /// Everything in the definition file.
    Report,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::HorizonExceeded { .. } | Error::MaximizerAtBracketCap { .. } => 3,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let defs = match &cli.defs {
        Some(p) => DefinitionFile::load(p)?,
        None => DefinitionFile {
            schema_version: SCHEMA_VERSION,
            ..Default::default()
        },
    };
    let mut settings = defs.settings.unwrap_or_default();
    if let Some(h) = cli.horizon {
        settings.horizon = h;
    }
    if let Some(g) = cli.grid {
        settings.grid_points = g;
    }
    settings.validate()?;
    let r = Resolver::new(&defs, settings);
    let text = match &cli.command {
        Command::Seq { name, checks } => cmd_seq(&r, name, checks, cli.format)?,
        Command::Omega { name, from, to } => cmd_omega(&r, name, *from, *to, cli.format)?,
        Command::Assoc { name } => cmd_assoc(&r, name, cli.format)?,
        Command::Compare { u, w, kind } => cmd_compare(&r, u, w, *kind, cli.format)?,
        Command::Include { a, b, equality } => cmd_include(&r, a, b, *equality, cli.format)?,
        Command::Closure { spec } => cmd_closure(&r, spec, cli.format)?,
        Command::Convolve { a, b } => cmd_convolve(&r, a, b, cli.format)?,
        Command::Report => {
            if cli.defs.is_none() {
                bail!("report needs --defs");
            }
            cmd_report(&r, cli.format)?
        }
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn envelope(command: &str, settings: &Settings, result: Value) -> anyhow::Result<String> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "settings": settings,
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn decision_settings(s: &Settings) -> DecisionSettings {
    DecisionSettings {
        thresholds: s.thresholds,
        horizon: s.horizon,
        grid_points: s.grid_points,
    }
}

fn seq_checks(r: &Resolver, m: &LogSequence, checks: &[SeqCheck]) -> Vec<(SeqCheck, Value)> {
    let th = &r.settings.thresholds;
    let mut checks = if checks.is_empty() {
        vec![SeqCheck::Logconvex, SeqCheck::Lc, SeqCheck::Mg, SeqCheck::Om1char]
    } else {
        checks.to_vec()
    };
    checks.sort();
    checks.dedup();
    checks
        .into_iter()
        .map(|c| {
            let v = match c {
                SeqCheck::Logconvex => json!({ "holds": m.is_log_convex() }),
                SeqCheck::Lc => json!({ "holds": m.is_lc() }),
                SeqCheck::Mg => verdict_or_error(check_mg_with(m, th)),
                SeqCheck::Om1char => verdict_or_error(check_om1_char_with(m, th)),
            };
            (c, v)
        })
        .collect()
}

fn verdict_or_error(v: wcalc_core::Result<Verdict>) -> Value {
    match v {
        Ok(v) => serde_json::to_value(v).expect("verdicts serialize"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn check_label(c: SeqCheck) -> &'static str {
    match c {
        SeqCheck::Logconvex => "logconvex",
        SeqCheck::Lc => "lc",
        SeqCheck::Mg => "mg",
        SeqCheck::Om1char => "om1char",
    }
}

fn sequence_summary(m: &LogSequence) -> Value {
    json!({
        "family": m.family(),
        "horizon": m.horizon(),
        "flags": m.flags(),
    })
}

fn cmd_seq(r: &Resolver, name: &str, checks: &[SeqCheck], format: Option<Format>) -> anyhow::Result<String> {
    let m = r.sequence(name)?;
    let results = seq_checks(r, &m, checks);
    match format.unwrap_or(Format::Json) {
        Format::Csv => Ok(verdict_rows_csv(
            results.iter().map(|(c, v)| (check_label(*c).to_string(), v.clone())),
        )),
        Format::Json => {
            let mut out = serde_json::Map::new();
            for (c, v) in results {
                out.insert(check_label(c).into(), v);
            }
            let mut summary = sequence_summary(&m);
            summary["name"] = json!(name);
            summary["checks"] = Value::Object(out);
            envelope("seq", &r.settings, summary)
        }
    }
}

fn cmd_omega(
    r: &Resolver,
    name: &str,
    from: Option<f64>,
    to: Option<f64>,
    format: Option<Format>,
) -> anyhow::Result<String> {
    let points = r.settings.grid_points;
    let curve = match r.source(name)? {
        Source::Sequence(m) => {
            let eval = OmegaEvaluator::new(&m);
            let default = eval.default_grid(points)?;
            let grid = GridSpec::new(from.unwrap_or(default.lo), to.unwrap_or(default.hi), points)?;
            eval.curve(&grid, name)?
        }
        Source::Weight(v) => {
            let (lo, hi) = match (from, to) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    let d = v.default_grid(r.settings.horizon, points)?;
                    (from.unwrap_or(d.lo), to.unwrap_or(d.hi))
                }
            };
            let grid = GridSpec::new(lo, hi, points)?;
            let mut c = wcalc_core::CurveSample::new(name, "omega");
            for t in grid.abscissae() {
                c.push(t, v.omega_v(t)?);
            }
            c
        }
    };
    match format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(curve.to_csv()),
        Format::Json => envelope("omega", &r.settings, serde_json::to_value(&curve)?),
    }
}

fn cmd_assoc(r: &Resolver, name: &str, format: Option<Format>) -> anyhow::Result<String> {
    let v = r.weight(name)?;
    let m = assoc_sequence(&v, v.assoc_horizon(r.settings.horizon))?;
    match format.unwrap_or(Format::Json) {
        Format::Csv => Ok(sequence_csv(&m)),
        Format::Json => envelope(
            "assoc",
            &r.settings,
            json!({
                "weight": v.to_string(),
                "horizon": m.horizon(),
                "flags": m.flags(),
                "logvals": m.logvals(),
            }),
        ),
    }
}

fn cmd_compare(r: &Resolver, u: &str, w: &str, kind: CompareKind, format: Option<Format>) -> anyhow::Result<String> {
    let (uw, ww) = (r.weight(u)?, r.weight(w)?);
    let h = uw.assoc_horizon(r.settings.horizon);
    let grid = uw
        .default_grid(h, r.settings.grid_points)?
        .clamp_hi(0.9 * ww.domain_end())?;
    let kind = match kind {
        CompareKind::Plain => RelationKind::Plain,
        CompareKind::Dilatation => RelationKind::Dilatation,
        CompareKind::Exponential => RelationKind::Exponential,
    };
    let v = check_weight_relation_with(&uw, &ww, kind, &grid, &r.settings.thresholds)?;
    let label = format!("{u} vs {w}");
    match format.unwrap_or(Format::Json) {
        Format::Csv => Ok(verdict_rows_csv([(label, serde_json::to_value(&v)?)])),
        Format::Json => envelope(
            "compare",
            &r.settings,
            json!({ "u": u, "w": w, "kind": kind, "grid": grid, "verdict": v }),
        ),
    }
}

fn decision_json(d: &Decision) -> Value {
    let mut v = serde_json::to_value(d).expect("decisions serialize");
    if let Some(l) = &d.landing {
        v["landing"] = json!({ "construction": "M*M", "horizon": l.horizon() });
    }
    v
}

fn decision_output(
    r: &Resolver,
    command: &str,
    label: String,
    d: &Decision,
    format: Option<Format>,
) -> anyhow::Result<String> {
    match format.unwrap_or(Format::Json) {
        Format::Csv => Ok(verdict_rows_csv([(label, serde_json::to_value(&d.verdict)?)])),
        Format::Json => {
            let mut v = decision_json(d);
            v["subject"] = json!(label);
            envelope(command, &r.settings, v)
        }
    }
}

fn cmd_include(r: &Resolver, a: &str, b: &str, equality: bool, format: Option<Format>) -> anyhow::Result<String> {
    let (sa, sb) = (r.space(a)?, r.space(b)?);
    let st = decision_settings(&r.settings);
    let (d, label) = if equality {
        (decide_equality_with(&sa, &sb, &st)?, format!("{a} = {b}"))
    } else {
        (decide_inclusion_with(&sa, &sb, &st)?, format!("{a} <= {b}"))
    };
    decision_output(r, "include", label, &d, format)
}

fn cmd_closure(r: &Resolver, spec: &[String], format: Option<Format>) -> anyhow::Result<String> {
    let (space, label) = match spec {
        [one] => (r.space(one)?, one.clone()),
        [system, source] => (r.space_from(system.parse()?, source)?, format!("{system}:{source}")),
        _ => return Err(anyhow!("closure takes a space or a system and a source")),
    };
    let d = decide_mult_closure_with(&space, &decision_settings(&r.settings))?;
    decision_output(r, "closure", label, &d, format)
}

fn cmd_convolve(r: &Resolver, a: &str, b: &str, format: Option<Format>) -> anyhow::Result<String> {
    let (m, n) = (r.sequence(a)?, r.sequence(b)?);
    let c = convolve(&m, &n)?;
    match format.unwrap_or(Format::Json) {
        Format::Csv => Ok(sequence_csv(&c)),
        Format::Json => envelope(
            "convolve",
            &r.settings,
            json!({ "a": a, "b": b, "horizon": c.horizon(), "flags": c.flags(), "logvals": c.logvals() }),
        ),
    }
}

fn error_value(e: anyhow::Error) -> Value {
    json!({ "error": format!("{e:#}") })
}

fn cmd_report(r: &Resolver, format: Option<Format>) -> anyhow::Result<String> {
    let defs = r.defs;
    let mut rows: Vec<(String, Value)> = Vec::new();

    let mut sequences = serde_json::Map::new();
    for name in defs.sequences.keys() {
        let entry = match r.sequence(name) {
            Ok(m) => {
                let mut s = sequence_summary(&m);
                let mut checks = serde_json::Map::new();
                for (c, v) in seq_checks(r, &m, &[]) {
                    rows.push((format!("seq {name} {}", check_label(c)), v.clone()));
                    checks.insert(check_label(c).into(), v);
                }
                s["checks"] = Value::Object(checks);
                s
            }
            Err(e) => error_value(e),
        };
        sequences.insert(name.clone(), entry);
    }

    let mut weights = serde_json::Map::new();
    for name in defs.weights.keys() {
        let entry = match r.weight(name) {
            Ok(w) => json!({ "weight": w.to_string(), "flags": w.resolved_flags() }),
            Err(e) => error_value(e),
        };
        weights.insert(name.clone(), entry);
    }

    let st = decision_settings(&r.settings);
    let mut closures = serde_json::Map::new();
    for name in defs.spaces.keys() {
        let entry = match r.space(name).and_then(|s| Ok(decide_mult_closure_with(&s, &st)?)) {
            Ok(d) => {
                rows.push((format!("closure {name}"), serde_json::to_value(&d.verdict)?));
                decision_json(&d)
            }
            Err(e) => error_value(e),
        };
        closures.insert(name.clone(), entry);
    }

    let mut inclusions = Vec::new();
    let by_system: Vec<(&String, SystemKind)> = defs.spaces.iter().map(|(n, d)| (n, d.system)).collect();
    for &(a, sa) in &by_system {
        for &(b, sb) in &by_system {
            if a == b || sa != sb {
                continue;
            }
            let res = r
                .space(a)
                .and_then(|x| Ok((x, r.space(b)?)))
                .and_then(|(x, y)| Ok(decide_inclusion_with(&x, &y, &st)?));
            let mut entry = match res {
                Ok(d) => {
                    rows.push((format!("include {a} <= {b}"), serde_json::to_value(&d.verdict)?));
                    decision_json(&d)
                }
                Err(e) => error_value(e),
            };
            entry["a"] = json!(a);
            entry["b"] = json!(b);
            inclusions.push(entry);
        }
    }

    match format.unwrap_or(Format::Json) {
        Format::Csv => Ok(verdict_rows_csv(rows)),
        Format::Json => envelope(
            "report",
            &r.settings,
            json!({
                "sequences": sequences,
                "weights": weights,
                "closures": closures,
                "inclusions": inclusions,
            }),
        ),
    }
}
