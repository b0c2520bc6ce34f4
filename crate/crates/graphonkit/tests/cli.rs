use std::fs;
use std::path::Path;
use std::process::Command;

use graphonkit::cli::main_with;
use graphonkit::io::{parse_graph, parse_graphon, read_graphon};
use graphonkit::CliError;
use graphonkit_core::exact::Q;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(std::iter::once("graphonkit").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TWO_BLOCK: &str = r#"{"weights": [0.5, 0.5], "values": [[0.9, 0.2], [0.2, 0.6]], "ambient_mass": 1}"#;

#[test]
fn cutnorm_of_zero_is_exact_zero() {
    let dir = tempfile::tempdir().unwrap();
    let z = write(dir.path(), "zero.json", r#"{"weights": [1], "values": [[0]], "ambient_mass": "inf"}"#);
    let (code, out, _) = run(&["cutnorm", &z]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["kind"], "EXACT");
}

#[test]
fn cutnorm_reports_rational_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"weights": ["0.5", "0.5"], "values": [[1, -1], [-1, 1]], "ambient_mass": 1}"#);
    let v = json(&run(&["cutnorm", &f]).1);
    assert_eq!(v["value"], 0.25);
    assert_eq!(v["rational"], "1/4");
    assert_eq!(v["witness_x"].as_array().unwrap().len(), 1);
    let h = json(&run(&["cutnorm", &f, "--heuristic", "3", "--seed", "1"]).1);
    assert_eq!(h["kind"], "LOWER_WITNESS");
    assert!(h["value"].as_f64().unwrap() <= 0.25);
    let (code, _, err) = run(&["cutnorm", &f, "--exact", "--k-exact", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("block"));
}

#[test]
fn dist_of_a_graphon_to_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", TWO_BLOCK);
    for mode in ["perm", "altlp", "both"] {
        let v = json(&run(&["dist", &w, &w, "--metric", "cut", "--mode", mode]).1);
        assert_eq!(v["value"], 0.0);
        assert_eq!(v["kind"], "EXACT");
        assert!(v["method"].is_string());
        assert_eq!(v["lower"], 0.0);
    }
}

#[test]
fn dist_lp_needs_p_and_rejects_signed_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"weights": [1], "values": [[1]], "ambient_mass": 1}"#);
    let b = write(dir.path(), "b.json", r#"{"weights": [1], "values": [[-1]], "ambient_mass": 1}"#);
    assert_eq!(run(&["dist", &a, &b, "--metric", "lp"]).0, 1);
    assert_eq!(run(&["dist", &a, &b, "--metric", "lp", "--p", "2"]).0, 1);
    let v = json(&run(&["dist", &a, &b, "--metric", "lp", "--p", "2", "--allow-signed"]).1);
    assert!((v["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert!(v["method"].as_str().unwrap().contains("NONMETRIC"));
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = run(&["verify", "edp"]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS"));
    assert!(!out.contains("FAIL"));
    assert_eq!(run(&["verify", "nonsense"]).0, 1);
    assert_eq!(CliError::VerifyFailed("x".into()).exit_code(), 2);
}

#[test]
fn usage_and_file_errors_exit_one() {
    assert_eq!(run(&[]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["dist", "only-one.json"]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("cutnorm"));
    assert_eq!(run(&["sample", "--help"]).0, 0);
    let (code, _, err) = run(&["cutnorm", "/nonexistent/w.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("file not found"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"weights\": [1], ");
    assert!(run(&["cutnorm", &bad]).2.contains("parse error"));
    let asym = write(dir.path(), "asym.json", r#"{"weights": [1, 1], "values": [[0, 1], [0, 0]], "ambient_mass": "inf"}"#);
    assert_eq!(run(&["cutnorm", &asym]).0, 1);
    assert_eq!(run(&["cutnorm", &asym, "--threads", "0"]).0, 1);
}

#[test]
fn example_files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ea3p.json");
    let (code, stdout, _) = run(&["example", "ea3p", "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let file = read_graphon(&out).unwrap();
    let exact = file.exact.expect("rational file reads exactly");
    let built = match graphonkit_core::gallery::build("ea3p", 2, 0).unwrap() {
        graphonkit_core::gallery::Built::Exact(e) => e,
        graphonkit_core::gallery::Built::Float(_) => panic!("ea3p is exact"),
    };
    assert_eq!(exact, built);
    assert_eq!(exact.weight(30), Q::new(2, 29));

    let (_, text, _) = run(&["example", "eurt", "--n", "2"]);
    let back = parse_graphon(&text, "eurt").unwrap();
    assert_eq!(back.graphon, graphonkit_core::gallery::eurt_family(2).unwrap());
}

#[test]
fn sample_writes_a_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", TWO_BLOCK);
    let (code, kept, _) = run(&["sample", &w, "--t", "12", "--seed", "4", "--keep-isolated"]);
    assert_eq!(code, 0);
    let kept = parse_graph(&kept, "kept").unwrap();
    let dropped = parse_graph(&run(&["sample", &w, "--t", "12", "--seed", "4"]).1, "dropped").unwrap();
    assert_eq!(kept.edges.len(), dropped.edges.len());
    assert!(dropped.n <= kept.n);
    for (u, v) in &dropped.edges {
        assert!(u < v && *v < dropped.n);
    }
    let mut deg = vec![0; dropped.n];
    for &(u, v) in &dropped.edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    assert!(deg.iter().all(|&d| d > 0));
    let infinite = write(dir.path(), "inf.json", r#"{"weights": [1], "values": [[2]], "ambient_mass": "inf"}"#);
    assert_eq!(run(&["sample", &infinite, "--t", "1"]).0, 1);
}

#[test]
fn sample_invariance_report() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", TWO_BLOCK);
    let v = json(&run(&["sample", &w, "--t", "3", "--invariance", "1", "--runs", "50", "--seed", "1"]).1);
    assert_eq!(v["pass"], true);
    assert_eq!(v["tests"].as_array().unwrap().len(), 4);
}

#[test]
fn converge_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", TWO_BLOCK);
    let (code, out, _) = run(&["converge", &w, "--tgrid", "2,4,8", "--runs", "3", "--seed", "1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,run,estimate,median");
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines[1].starts_with("2,0,"));
    assert!(lines[9].starts_with("8,2,"));
    assert_eq!(run(&["converge", &w, "--tgrid", "4,2", "--runs", "3"]).0, 1);
}

#[test]
fn diag_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", TWO_BLOCK);
    let b = write(dir.path(), "b.json", r#"{"weights": [4], "values": [["0.0625"]], "ambient_mass": "inf"}"#);
    let (code, out, _) = run(&["diag", "ui", "--family", &a, &b, "--B", "0.5,1"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["graphon_id", "parameter", "value"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let find = |id: &str, param: &str| -> f64 {
        rows.iter().find(|r| r[0] == *id && r[1] == *param).unwrap()[2].parse().unwrap()
    };
    assert_eq!(find(&b, "l1"), 1.0);
    assert!((find(&a, "tail[B=0.5]") - 0.25 * (0.9 + 0.6)).abs() < 1e-15);
    assert_eq!(find("family", "sup_l1[B=1]"), 1.0);

    let out = run(&["diag", "ucr", "--family", &a, "--B", "0.5"]).1;
    assert!(out.contains("cut_error[B=0.5,EXACT]"));
    let out = run(&["diag", "tails", "--family", &a, &b, "--M", "1"]).1;
    assert!(out.contains("l1_tail[M=1,EXACT]"));
    assert_eq!(run(&["diag", "ui", "--family", &a, "--B", "-1"]).0, 1);
}

#[test]
fn entropy_and_stretch() {
    let dir = tempfile::tempdir().unwrap();
    let half = write(dir.path(), "h.json", r#"{"weights": [1], "values": [[0.5]], "ambient_mass": 1}"#);
    let v = json(&run(&["entropy", &half]).1);
    assert!((v["entropy"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-15);

    let w = write(dir.path(), "w.json", TWO_BLOCK);
    let stretched = parse_graphon(&run(&["stretch", &w, "--u", "4"]).1, "s").unwrap().graphon;
    assert_eq!(stretched.weights(), &[1.0, 1.0]);
    let n = parse_graphon(&run(&["stretch", &w, "--normalize"]).1, "n").unwrap().graphon;
    assert!((n.l1_norm() - 1.0).abs() < 1e-12);
    assert_eq!(run(&["stretch", &w]).0, 1);
    assert_eq!(run(&["stretch", &w, "--u", "2", "--normalize"]).0, 1);
}

fn bin(args: &[&str], env: Option<(&str, &str)>) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_graphonkit"));
    cmd.args(args).env_remove("GRAPHONKIT_THREADS");
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

#[test]
fn binary_exit_codes_and_thread_env() {
    assert_eq!(bin(&["verify", "edp"], None).status.code(), Some(0));
    assert_eq!(bin(&["bogus"], None).status.code(), Some(1));
    assert_eq!(bin(&["--help"], None).status.code(), Some(0));
    let a = bin(&["example", "enotui", "--n", "2", "--seed", "3"], Some(("GRAPHONKIT_THREADS", "1")));
    let b = bin(&["example", "enotui", "--n", "2", "--seed", "3"], Some(("GRAPHONKIT_THREADS", "3")));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(bin(&["verify", "edp"], Some(("GRAPHONKIT_THREADS", "0"))).status.code(), Some(1));
}
