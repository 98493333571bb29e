use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/defs.json")
}

fn wcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn seq_mg_for_gevrey() {
    let v = json_of(&wcalc(&["seq", "gevrey1", "--check", "mg"]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["checks"]["mg"]["status"]["kind"], "proved");
    assert_eq!(v["result"]["checks"]["mg"]["witness_constants"]["C"], 2.0);
    assert!(v["settings"]["thresholds"]["trend"].is_number());
}

#[test]
fn seq_mg_for_q_gevrey_fails() {
    let v = json_of(&wcalc(&["seq", "qgevrey2", "--check", "mg"]));
    assert_ne!(v["result"]["checks"]["mg"]["status"]["kind"], "proved");
    assert_ne!(v["result"]["checks"]["mg"]["status"]["kind"], "holds_on_horizon");
}

#[test]
fn unknown_name_exits_2() {
    let out = wcalc(&["seq", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nosuch"));
}

#[test]
fn omega_csv() {
    let out = wcalc(&["omega", "gevrey1", "--from", "0.5", "--to", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,omega"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (t, w) = l.split_once(',').unwrap();
            (t.parse().unwrap(), w.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 64);
    let (t, w) = rows[rows.len() - 1];
    assert_eq!(t, 3.0);
    assert!((w - 1.504077).abs() < 1e-6);
    assert!(rows.windows(2).all(|p| p[1].1 >= p[0].1));
    assert!(rows.iter().filter(|r| r.0 <= 1.0).all(|r| r.1 == 0.0));
}

#[test]
fn omega_out_of_domain_exits_3() {
    let out = wcalc(&["omega", "gevrey1", "--from", "1", "--to", "1e6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn convolve_and_assoc_values() {
    let v = json_of(&wcalc(&["convolve", "gevrey1", "gevrey1"]));
    assert!((v["result"]["logvals"][4].as_f64().unwrap() - 4f64.ln()).abs() < 1e-12);
    let v = json_of(&wcalc(&["assoc", "exppower:1,1"]));
    let l2 = v["result"]["logvals"][2].as_f64().unwrap();
    assert!((l2 - (4f64.ln() - 2.0)).abs() < 1e-8);
}

#[test]
fn include_reports_the_rule() {
    let v = json_of(&wcalc(&["include", "single:gevrey2", "single:gevrey1"]));
    assert_eq!(v["result"]["rule"], "single-sequence-strong-domination");
    assert_eq!(v["result"]["verdict"]["status"]["kind"], "proved");
    let v = json_of(&wcalc(&[
        "include",
        "dilatation-inductive:gevrey1",
        "dilatation-inductive:gevrey2",
    ]));
    assert_eq!(v["result"]["verdict"]["status"]["kind"], "refuted");
}

#[test]
fn mixed_systems_exit_2() {
    let out = wcalc(&[
        "include",
        "dilatation-inductive:gevrey1",
        "dilatation-projective:gevrey1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn closure_for_q_gevrey() {
    let v = json_of(&wcalc(&["closure", "dilatation-inductive", "qgevrey2"]));
    assert_ne!(v["result"]["verdict"]["status"]["kind"], "proved");
    assert_eq!(v["result"]["rule"], "dilatation-sequence-moderate-growth");
}

#[test]
fn report_is_byte_identical_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let defs = fixture();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = wcalc(&[
            "report",
            "--defs",
            defs.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["settings"]["horizon"], 256);
    assert!(!v["result"]["inclusions"].as_array().unwrap().is_empty());
}

#[test]
fn report_csv() {
    let out = wcalc(&["report", "--defs", fixture().to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("item,status,trend,horizon_used,constants\n"));
    assert!(text.contains("closure single_g1,refuted"));
}

#[test]
fn bad_definition_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"schema_version": 9}"#).unwrap();
    let out = wcalc(&["report", "--defs", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
