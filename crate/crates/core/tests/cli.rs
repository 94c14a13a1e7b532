use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use pseudomode::cli::{CertifyReport, ColumnReport};
use pseudomode::estimator::Method;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pseudomode"));
    cmd.env_remove("PSEUDOMODE_CONFIG");
    cmd
}

fn file_with(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], input: Option<&Path>) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    if let Some(p) = input {
        cmd.arg("--input").arg(p);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn estimate_lipschitz_large_k() {
    let f = file_with("v\n0\n0\n0\n1\n");
    let o = run(&["estimate", "--k", "20", "--method", "lipschitz", "--epsilon", "1e-3"], Some(f.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let reports: Vec<ColumnReport> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].report.method, Method::PseudoModeLipschitz);
    assert!(reports[0].report.location_raw.abs() <= 0.02);
}

#[test]
fn estimate_both_columns() {
    let f = file_with("a,b\n1,10\n2,20\n2,20\n9,90\n");
    let o = run(&["estimate", "--column", "both", "--method", "median"], Some(f.path()));
    assert_eq!(o.status.code(), Some(0));
    let reports: Vec<ColumnReport> = serde_json::from_str(&stdout(&o)).unwrap();
    let got: Vec<(&str, f64)> = reports.iter().map(|r| (r.column.as_str(), r.report.location_raw)).collect();
    assert_eq!(got, vec![("a", 2.0), ("b", 20.0)]);
}

#[test]
fn every_method_runs() {
    let f = file_with("x\n0.1\n0.2\n0.2\n0.25\n0.9\n");
    for method in ["pseudo", "mean", "median", "mode", "pseudo-lipschitz", "pseudo-quasi", "oracle"] {
        let o = run(&["estimate", "--method", method, "--epsilon", "1e-4", "--grid", "100001"], Some(f.path()));
        assert_eq!(o.status.code(), Some(0), "{method}: {}", stderr(&o));
    }
}

#[test]
fn json_round_trip_and_determinism() {
    let f = file_with("x;y\n1.5;3\n2.25;-1e-2\n2.5;4\n7;8\n");
    let args = ["estimate", "--column", "all", "--k", "5"];
    let first = run(&args, Some(f.path()));
    let second = run(&args, Some(f.path()));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let reports: Vec<ColumnReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(reports.len(), 2);
    let again = serde_json::to_string_pretty(&reports).unwrap();
    assert_eq!(again.trim_end(), text.trim_end());
    let reparsed: Vec<ColumnReport> = serde_json::from_str(&again).unwrap();
    assert_eq!(reparsed, reports);
}

#[test]
fn stdin_and_tab_delimiter() {
    let mut child = bin()
        .args(["estimate", "--method", "mean", "--format", "csv"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"1\t100\n3\t200\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][0], "column0");
    assert_eq!(rows[0][3], "mean");
    assert_eq!(rows[0][4], "2");
}

#[test]
fn input_errors_exit_one() {
    let empty = file_with("");
    let o = run(&["estimate"], Some(empty.path()));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error"));

    let o = run(&["estimate"], Some(Path::new("/nonexistent/data.csv")));
    assert_eq!(o.status.code(), Some(1));

    let o = bin().args(["estimate", "--k", "abc"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));

    let f = file_with("v\n1\n2\n");
    assert_eq!(run(&["estimate", "--k", "-1"], Some(f.path())).status.code(), Some(1));
    assert_eq!(run(&["estimate", "--column", "w"], Some(f.path())).status.code(), Some(1));
}

#[test]
fn malformed_cells_are_counted_then_rejected() {
    let mut text = String::from("v\n");
    for i in 0..30 {
        text.push_str(&format!("{}\n", i % 7));
    }
    text.push_str("n/a\n");
    let f = file_with(&text);
    let o = run(&["estimate", "--method", "mean"], Some(f.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("skipped 1 of 31"));
    let reports: Vec<ColumnReport> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(reports[0].skipped, 1);

    text.push_str("x\ny\nz\n");
    let f = file_with(&text);
    assert_eq!(run(&["estimate"], Some(f.path())).status.code(), Some(1));
}

#[test]
fn exhausted_budget_exits_two() {
    let f = file_with("0\n0.2\n0.21\n0.7\n1\n");
    let o = run(
        &["estimate", "--method", "pseudo-lipschitz", "--k", "30", "--epsilon", "1e-9", "--budget", "40"],
        Some(f.path()),
    );
    assert_eq!(o.status.code(), Some(2));
    let reports: Vec<ColumnReport> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!reports[0].report.certified);
}

#[test]
fn losscurve_center_and_transitions() {
    let o = run(&["losscurve", "--k", "1", "--m", "2", "--half-width", "5", "--grid", "100001"], None);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[50_000], vec!["0", "-0.25", "0", "0.125", "convex"]);
    let step = 1e-4;
    let transitions: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[0][4] != w[1][4] && w[1][0].parse::<f64>().unwrap() > 0.0)
        .map(|w| w[1][0].parse().unwrap())
        .collect();
    assert_eq!(transitions.len(), 2);
    // alpha crosses 4 and 10
    assert!((transitions[0] - 2.0f64.acosh()).abs() <= step);
    assert!((transitions[1] - 5.0f64.acosh()).abs() <= step);

    let o = run(&["losscurve", "--k", "1", "--m", "0", "--half-width", "5", "--grid", "100001"], None);
    let rows = csv_rows(&stdout(&o));
    let transitions: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[0][4] != w[1][4] && w[1][0].parse::<f64>().unwrap() > 0.0)
        .map(|w| w[1][0].parse().unwrap())
        .collect();
    let b = pseudomode::loss::region_boundaries(0.0);
    assert!((transitions[0] - (b.convex_end / 2.0).acosh()).abs() <= step);
    assert!((transitions[1] - (b.concave_end / 2.0).acosh()).abs() <= step);
}

#[test]
fn quasi_trace_bracket_shrinks_to_epsilon() {
    let f = file_with("0.1\n0.35\n0.4\n0.8\n");
    let o = run(&["trace", "--method", "pseudo-quasi", "--epsilon", "1e-6"], Some(f.path()));
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let widths: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(widths.windows(2).all(|w| w[1] <= w[0]));
    assert!(*widths.last().unwrap() <= 1e-6);
}

#[test]
fn lipschitz_trace_gap_and_counts() {
    let f = file_with("0\n0.3\n0.31\n1\n");
    let args = ["trace", "--method", "pseudo-lipschitz", "--k", "12", "--epsilon", "1e-4"];
    let o = run(&args, Some(f.path()));
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let gaps: Vec<f64> = rows.iter().skip(2).map(|r| r[5].parse().unwrap()).collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]));

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let o = run(&json_args, Some(f.path()));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let evals = v["report"]["evaluations"].as_u64().unwrap();
    let records = v["trace"]["records"].as_array().unwrap();
    assert_eq!(records.last().unwrap()["evaluations"].as_u64().unwrap(), evals);
    assert_eq!(rows.last().unwrap()[6].parse::<u64>().unwrap(), evals);
}

#[test]
fn certify_diagnostics() {
    let f = file_with("0.05\n0.3\n0.31\n0.6\n0.92\n");
    let o = run(&["certify"], Some(f.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: CertifyReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.passed && r.max_certificate < 3.997);

    let pair = file_with("0\n1\n");
    let o = run(&["certify", "--k", "10"], Some(pair.path()));
    assert_eq!(o.status.code(), Some(2));
    let r: CertifyReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!r.unimodality.passed);
    assert!((r.unimodality.first_violation.unwrap() - 0.5).abs() < 0.01);

    let single = file_with("4.2\n");
    let o = run(&["certify", "--k", "40"], Some(single.path()));
    assert_eq!(o.status.code(), Some(0));

    assert_eq!(run(&["certify", "--m", "1"], Some(f.path())).status.code(), Some(1));
}

#[test]
fn synth_is_seeded() {
    let a = run(&["synth", "--seed", "11", "--n", "50", "--mass", "3"], None);
    let b = run(&["synth", "--seed", "11", "--n", "50", "--mass", "3"], None);
    let c = run(&["synth", "--seed", "12", "--n", "50", "--mass", "3"], None);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let rows = csv_rows(&stdout(&a));
    assert_eq!(rows.len(), 50);
    assert_eq!(rows.iter().filter(|r| r[0] == "3").count(), 40);

    let o = run(&["synth", "--n", "10", "--outlier", "1e6"], None);
    assert_eq!(csv_rows(&stdout(&o)).last().unwrap()[0], "1000000");
}

#[test]
fn config_file_with_flag_override() {
    let cfg = file_with("k = 20.0\nmethod = \"pseudo-lipschitz\"\nepsilon = 1e-3\n");
    let data = file_with("v\n0\n0\n0\n1\n");
    let o = bin()
        .env("PSEUDOMODE_CONFIG", cfg.path())
        .args(["estimate", "--input"])
        .arg(data.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r: Vec<ColumnReport> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r[0].report.parameters.k, r[0].report.method), (20.0, Method::PseudoModeLipschitz));

    let o = bin()
        .env("PSEUDOMODE_CONFIG", cfg.path())
        .args(["estimate", "--method", "mean", "--input"])
        .arg(data.path())
        .output()
        .unwrap();
    let r: Vec<ColumnReport> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r[0].report.method, Method::Mean);

    let bad = file_with("colour = \"blue\"\n");
    let o = bin().env("PSEUDOMODE_CONFIG", bad.path()).args(["synth"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
