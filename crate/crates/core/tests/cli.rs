use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tenfac::cli::run_with;
use tenfac::io::{serialize_graph, Convention, FIXTURE_BUNDLE};
use tenfac::ColoredGraph;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Out {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("tenfac").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Out { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn graph_file(dir: &Path, name: &str, g: &ColoredGraph, convention: Convention) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serialize_graph(g, convention).unwrap() + "\n").unwrap();
    path
}

fn schema_check(doc: &Value) {
    let schema: Value = serde_json::from_str(include_str!("../schema/output.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}\n{doc:#}");
}

fn run_json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let doc: Value = serde_json::from_str(&o.stdout).unwrap();
    schema_check(&doc);
    doc
}

#[test]
fn verify_fixtures_summary() {
    let o = run(&["verify-fixtures"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout.trim(), "41/41 pass: MST, non-bipartite, maxF=12");
}

#[test]
fn max_faces_on_tetrahedron() {
    let dir = tempfile::tempdir().unwrap();
    let path = graph_file(dir.path(), "t.txt", &ColoredGraph::tetrahedron(), Convention::Explicit);
    for flag in ["--exact", "--pruned"] {
        let o = run(&["max-faces", "--graph", path.to_str().unwrap(), flag]);
        assert_eq!((o.code, o.stdout.trim()), (0, "4"));
    }
}

#[test]
fn survey_n4() {
    let o = run(&["survey", "--n", "4", "--workers", "1"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("MST classes: 4\n"), "{}", o.stdout);
    assert!(o.stdout.contains("max_f (MST): 7:4\n"), "{}", o.stdout);
}

#[test]
fn survey_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let ck = dir.path().join("r.ck");
    let o = run(&["survey", "--n", "3", "--out", out.to_str().unwrap(), "--checkpoint", ck.to_str().unwrap()]);
    assert_eq!(o.code, 0);
    let report: tenfac::SurveyReport = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report.summary.mst_classes, 2);
    assert!(ck.exists());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["survey"][..],
        &["survey", "--n", "4", "--mode", "bogus"],
        &["survey", "--n", "12"],
        &["max-faces", "--graph", "/nonexistent/graph.txt"],
        &["moment", "--graph", "x", "--mc", "10"],
        &["count-classes", "--n", "9"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.code, 2, "{args:?}: {}", o.stderr);
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["survey", "--n", "4", "--mode", "bogus"]);
    assert!(o.stderr.contains("--mode"), "{}", o.stderr);
    let o = run(&["max-faces", "--graph", "/nonexistent/graph.txt"]);
    assert!(o.stderr.contains("--graph"), "{}", o.stderr);
}

#[test]
fn malformed_graph_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "n=2; 3: {1,3},{2,3}\n").unwrap();
    let o = run(&["bound", "--graph", path.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line 1"), "{}", o.stderr);
}

#[test]
fn tampered_fixtures_fail_closed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bundle.txt");
    std::fs::write(&path, FIXTURE_BUNDLE.replacen("{1,3},{2,6}", "{1,3},{2,7}", 1).replacen("{5,12},{7,9}", "{5,12},{6,9}", 1))
        .unwrap();
    let o = run(&["verify-fixtures", "--fixtures", path.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("does not match"));
    let o = run(&["verify-fixtures", "--fixtures", path.to_str().unwrap(), "--allow-unpinned"]);
    assert_eq!(o.code, 1, "{}{}", o.stdout, o.stderr);
    assert!(o.stdout.contains("FAIL"));
    std::fs::write(&path, FIXTURE_BUNDLE).unwrap();
    assert_eq!(run(&["verify-fixtures", "--fixtures", path.to_str().unwrap()]).code, 0);
}

#[test]
fn json_outputs_match_schema() {
    let dir = tempfile::tempdir().unwrap();
    let tet = graph_file(dir.path(), "t.txt", &ColoredGraph::tetrahedron(), Convention::Explicit);
    let fix = graph_file(dir.path(), "f.txt", &tenfac::io::embedded_fixtures()[0], Convention::Table3);
    let (tet, fix) = (tet.to_str().unwrap(), fix.to_str().unwrap());

    let doc = run_json(&["survey", "--n", "4"]);
    assert_eq!(doc["summary"]["mst_classes"], 4);
    run_json(&["survey", "--n", "4", "--mode", "mst-only", "--engine", "table"]);
    run_json(&["survey", "--n", "4", "--policy", "certify-non-mst"]);
    let doc = run_json(&["verify-fixtures"]);
    assert_eq!(doc["all_pass"], true);
    let doc = run_json(&["max-faces", "--graph", tet]);
    assert_eq!(doc["max_f"], 4);
    let doc = run_json(&["max-faces", "--graph", fix, "--exact"]);
    assert_eq!((doc["max_f"].as_u64(), doc["violates"].as_bool()), (Some(12), Some(true)));
    let doc = run_json(&["bound", "--graph", fix]);
    assert_eq!(doc["certificate"]["rule"], "flip");
    run_json(&["bound", "--graph", tet]);
    run_json(&["moment", "--graph", tet]);
    let doc = run_json(&["moment", "--graph", tet, "--nu", "2", "--eval", "3", "--mc", "2000", "--seed", "5", "--N", "2"]);
    assert_eq!(doc["evaluation"]["wick_sum"], "243");
    run_json(&["canon", "--graph", fix]);
    run_json(&["canon", "--graph", tet, "--up-to-colors"]);
    let doc = run_json(&["count-classes", "--n", "3"]);
    assert_eq!(doc["classes"], 11);
}

#[test]
fn binary_reads_worker_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_tenfac"))
        .args(["--json", "survey", "--n", "3"])
        .env("TENFAC_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["provenance"]["workers"], 2);
}
