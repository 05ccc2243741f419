use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use econreason::report::ResultDocument;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_econreason"))
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const HEAVY: &str = "scalars x, y, z, w;
assume x^3*y + y^3*z + z^3*x - w^2 > 0;
assume x^2 + y^2 + z^2 + w^2 < 1;
assume x*y - z*w > 1/10;
hypothesis x*y*z*w < 1/50;
";

#[test]
fn analyze_prints_verdict() {
    let f = corpus("tax_incidence.econ");
    let o = run(&["analyze", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("Verdict: True"), "{out}");
    assert!(out.contains("Example:"));
    assert!(out.contains("Stats:"));
}

#[test]
fn possibilities_json_for_one_variable() {
    let f = corpus("tax_incidence.econ");
    let o = run(&["possibilities", f.to_str().unwrap(), "--var", "t", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: ResultDocument = serde_json::from_slice(&o.stdout).unwrap();
    let fs = doc.formulas.unwrap();
    assert_eq!(fs.len(), 1);
    assert_eq!(fs["t"], "-1 < t && t < 0");
}

#[test]
fn unknown_variable_is_a_usage_error() {
    let f = corpus("tax_incidence.econ");
    let o = run(&["possibilities", f.to_str().unwrap(), "--var", "nope", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "bad_request");
}

#[test]
fn sufficient_names_the_missing_slope() {
    let f = corpus("tax_incidence_missing.econ");
    let o = run(&["sufficient", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("Verdict: Mixed"), "{out}");
    assert!(out.contains("Suggestion (verified): supply'(price) >= 0"), "{out}");
}

#[test]
fn space_lists_coordinates() {
    let f = corpus("tax_incidence.econ");
    let o = run(&["space", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("D(price, tax)"));
    assert!(out.contains("supply'(price)"));
}

#[test]
fn missing_file_exits_with_usage_code() {
    let o = run(&["analyze", "/nonexistent/theory.econ"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn single_equals_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.econ", "scalars x;\nassume x = 1;\nhypothesis x > 0;\n");
    let o = run(&["analyze", f.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "parse_error");
    assert_eq!(v["diagnostics"][0]["code"], "E2");
    assert!(String::from_utf8_lossy(&o.stderr).contains("E2"));
}

#[test]
fn timeout_is_a_resource_error_and_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "heavy.econ", HEAVY);
    let start = Instant::now();
    let o = run(&["analyze", f.to_str().unwrap(), "--timeout", "0.5", "--json"]);
    let secs = start.elapsed().as_secs_f64();
    assert_eq!(o.status.code(), Some(2));
    assert!(secs < 1.0 + 0.5, "took {secs}s");
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "resource_limit");
    assert_eq!(v["resource"], "timeout");
}

#[test]
fn cell_limit_is_a_resource_error() {
    let f = corpus("tax_incidence.econ");
    let o = run(&["analyze", f.to_str().unwrap(), "--max-cells", "1", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["resource"], "cells");
}

#[test]
fn bad_options_are_rejected() {
    let f = corpus("tax_incidence.econ");
    for args in [["--timeout", "0"], ["--timeout", "-1"], ["--max-cells", "0"], ["--order", "random"]] {
        let o = run(&["analyze", f.to_str().unwrap(), args[0], args[1]]);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("analyze"));
}

#[test]
fn every_quadrant_exits_zero() {
    for (file, verdict) in [
        ("tax_incidence.econ", "True"),
        ("false_quadrant.econ", "False"),
        ("tax_incidence_missing.econ", "Mixed"),
        ("contradictory.econ", "ContradictoryAssumptions"),
    ] {
        let f = corpus(file);
        let o = run(&["analyze", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{file}");
        assert!(stdout(&o).contains(&format!("Verdict: {verdict}")), "{file}");
    }
}

#[test]
fn result_documents_round_trip_for_corpus() {
    let list = run(&["examples", "list", "--json"]);
    let examples: Vec<Value> = serde_json::from_slice(&list.stdout).unwrap();
    assert_eq!(examples.len(), 6);
    for e in examples {
        let id = e["id"].as_str().unwrap();
        let f = corpus(&format!("{id}.econ"));
        let o = run(&["analyze", f.to_str().unwrap(), "--json"]);
        assert_eq!(o.status.code(), Some(0), "{id}");
        let doc: ResultDocument = serde_json::from_slice(&o.stdout).unwrap();
        let again: ResultDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(doc, again, "{id}");
        assert!(doc.verdict.is_some());
    }
}

#[test]
fn examples_show_prints_source() {
    let o = run(&["examples", "show", "cauchy_schwarz"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("vectors u, v;"));
    let o = run(&["examples", "show", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_all_matches_golden() {
    let o = run(&["examples", "run-all", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r["verdict"], r["expected"], "{r}");
        assert!(r["total_ms"].as_f64().unwrap() >= 0.0);
    }
    let contradictory = rows.iter().find(|r| r["example"] == "contradictory").unwrap();
    assert_eq!(contradictory["verdict"], "ContradictoryAssumptions");
    assert!(contradictory["universal_ms"].is_null());

    let text = run(&["examples", "run-all"]);
    let table = stdout(&text);
    assert!(table.lines().next().unwrap().contains("total ms"));
    assert!(table.contains("ContradictoryAssumptions"));
}

#[test]
fn run_all_on_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["examples", "--dir", dir.path().to_str().unwrap(), "run-all"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn run_all_reports_golden_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "t.econ", "scalars x;\nassume x > 0;\nhypothesis x > 1;\n");
    write(dir.path(), "golden.json", "{\"t\": \"True\"}");
    let o = run(&["examples", "--dir", dir.path().to_str().unwrap(), "run-all", "--json"]);
    assert_eq!(o.status.code(), Some(3));
    let rows: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["verdict"], "Mixed");
    assert!(String::from_utf8_lossy(&o.stderr).contains("mismatch"));
}
