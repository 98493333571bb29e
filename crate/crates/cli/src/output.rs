//! CSV rendering for sequences and verdict lists.

use std::fmt::Write;

use clap::ValueEnum;
use serde_json::Value;
use wcalc_core::LogSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn sequence_csv(m: &LogSequence) -> String {
    let mut out = String::from("j,log_value\n");
    for (j, l) in m.logvals().iter().enumerate() {
        writeln!(out, "{j},{l}").unwrap();
    }
    out
}

fn field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One row per item: `item,status,trend,horizon_used,constants`. Items that
/// are flags or errors leave the numeric columns empty.
pub fn verdict_rows_csv(rows: impl IntoIterator<Item = (String, Value)>) -> String {
    let mut out = String::from("item,status,trend,horizon_used,constants\n");
    for (item, v) in rows {
        let status = if let Some(k) = v.pointer("/status/kind") {
            field(k)
        } else if let Some(h) = v.get("holds") {
            if h.as_bool() == Some(true) { "holds" } else { "fails" }.to_string()
        } else if v.get("error").is_some() {
            "error".to_string()
        } else {
            String::new()
        };
        let constants = v
            .get("witness_constants")
            .and_then(Value::as_object)
            .map(|m| {
                m.iter()
                    .map(|(k, x)| format!("{k}={}", field(x)))
                    .collect::<Vec<_>>()
                    .join(";")
            })
            .unwrap_or_default();
        let trend = v.get("trend").map(field).unwrap_or_default();
        let horizon = v.get("horizon_used").map(field).unwrap_or_default();
        writeln!(out, "{},{status},{trend},{horizon},{constants}", item.replace(',', ";")).unwrap();
    }
    out
}
