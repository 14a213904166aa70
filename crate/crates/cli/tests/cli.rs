use std::path::Path;
use std::process::{Command, Output};

use smtrace::congruences::CongruenceReport;
use smtrace::qseries::QSeries;
use smtrace::traces::TraceTable;

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smtrace"))
        .args(args)
        .env("SMT_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn ok(cache: &Path, args: &[&str]) -> String {
    let o = run(cache, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn forms_examples() {
    let d = tempfile::tempdir().unwrap();
    let v = json(&ok(d.path(), &["forms", "--disc", "3", "--level", "1"]));
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    assert_eq!(v["classes"][0]["a"], 1);
    assert_eq!(v["classes"][0]["stab"], 3);
    let v = json(&ok(d.path(), &["forms", "--disc", "20", "--level", "1"]));
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    assert_eq!(run(d.path(), &["forms", "--disc", "5", "--level", "1"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["forms", "--disc", "3", "--level", "0"]).status.code(), Some(2));
}

#[test]
fn cusps_level_four() {
    let d = tempfile::tempdir().unwrap();
    let v = json(&ok(d.path(), &["cusps", "--level", "4"]));
    let labels: Vec<&str> = v["cusps"].as_array().unwrap().iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["0", "1/2", "inf"]);
    let csv = ok(d.path(), &["cusps", "--level", "4", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn trace_values_and_round_trip() {
    let d = tempfile::tempdir().unwrap();
    for (idx, want) in [("3", "-248"), ("4", "492"), ("7", "-4119")] {
        let out = ok(d.path(), &["trace", "--f", "builtin:J", "--level", "1", "--delta", "1", "--index", idx]);
        let t = TraceTable::from_json(&out).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(smtrace::serde_rational::render(&t.entries[0].value), want);
        let again = serde_json::to_value(&t).unwrap();
        assert_eq!(again, json(&out));
    }
    let out = ok(d.path(), &["trace", "--from", "-1", "--to", "4", "--format", "csv"]);
    assert_eq!(out.lines().count(), 7);
    assert_eq!(run(d.path(), &["trace", "--index", "3", "--bits", "32"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["trace", "--index", "3", "--f", "builtin:nope"]).status.code(), Some(2));
}

#[test]
fn cache_is_transparent_and_output_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let args = ["trace", "--from", "1", "--to", "30"];
    let cold = ok(d.path(), &args);
    assert!(std::fs::read_dir(d.path()).unwrap().count() == 1);
    let warm = ok(d.path(), &args);
    assert_eq!(cold, warm);
    let e = tempfile::tempdir().unwrap();
    assert_eq!(ok(e.path(), &args), cold);
}

#[test]
fn series_and_sieve() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(d.path(), &["series", "--max", "4"]);
    let v = json(&out);
    let s: QSeries = serde_json::from_value(v["series"].clone()).unwrap();
    assert_eq!(s, QSeries::from_ints(5, &[(-1, 1), (0, -2), (3, -248), (4, 492)]));
    assert_eq!(serde_json::to_value(&s).unwrap(), v["series"]);

    let twisted = json(&ok(d.path(), &["series", "--delta", "5", "--max", "20"]));
    assert_eq!(twisted["radicand"], 5);
    let s5: QSeries = serde_json::from_value(twisted["series"].clone()).unwrap();
    assert!(s5.terms().all(|(n, _)| n % 5 == 0));

    let full = ok(d.path(), &["series", "--max", "30"]);
    let path = d.path().join("g.json");
    std::fs::write(&path, &full).unwrap();
    let p = path.to_str().unwrap();
    let sieved: QSeries = serde_json::from_str(&ok(d.path(), &["sieve", "--t", "3", "--in", p])).unwrap();
    assert!(sieved.terms().all(|(n, _)| smtrace::arith::kronecker(n, 3) == -1));
    assert_ne!(sieved.coeff(8), 0);
    let o = run(d.path(), &["sieve", "--t", "1", "--in", p]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let z: QSeries = serde_json::from_slice(&o.stdout).unwrap();
    assert!(z.is_zero());
    let u: QSeries = serde_json::from_str(&ok(d.path(), &["sieve", "--t", "3", "--in", p, "--r", "2"])).unwrap();
    assert_eq!(u.coeff(4), sieved.coeff(8));
}

#[test]
fn congruence_scan_surface() {
    let d = tempfile::tempdir().unwrap();
    let args = ["congruence-scan", "--p", "3", "--nu", "1", "--t", "3", "--level", "1", "--delta", "1", "--r-count", "1", "--n-max", "8"];
    let out = ok(d.path(), &args);
    let v = json(&out);
    assert_eq!(v["params"]["r_candidates"], serde_json::json!([107]));
    let reports: Vec<CongruenceReport> = serde_json::from_value(v["reports"].clone()).unwrap();
    // m_exp = 1 with p = t: no admissible n
    assert!(reports[0].checked.is_empty() && reports[0].verdict);
    assert_eq!(serde_json::to_value(&reports).unwrap(), v["reports"]);
    let bad = run(d.path(), &["congruence-scan", "--p", "3", "--t", "3", "--r-list", "109", "--n-max", "8"]);
    assert_eq!(bad.status.code(), Some(2));
    let even_t = run(d.path(), &["congruence-scan", "--p", "3", "--t", "4", "--n-max", "8"]);
    assert_eq!(even_t.status.code(), Some(2));
}

#[test]
fn verify_cases_pass() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "--case", "zagier-g", "--max", "50"][..],
        &["verify", "--case", "prop43", "--max-m", "12"],
        &["verify", "--case", "dual-path", "--samples", "30", "--seed", "5"],
    ] {
        let v = json(&ok(d.path(), args));
        assert_eq!(v["pass"], true, "{args:?}");
    }
}
