use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn locality(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locality"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn gen(dir: &Path, name: &str, args: &[&str]) {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", name]);
    assert_eq!(locality(dir, &full).status.code(), Some(0), "gen {args:?}");
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn gen_prints_a_structure() {
    let dir = tempfile::tempdir().unwrap();
    let out = locality(dir.path(), &["gen", "cycle", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["size"], 4);
    assert_eq!(v["relations"]["E"].as_array().unwrap().len(), 8);
}

#[test]
fn ef_reports_a_sentence_that_separates() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "a.json", &["order", "3"]);
    gen(dir.path(), "b.json", &["order", "7"]);
    let out = locality(
        dir.path(),
        &["ef", "--a", "a.json", "--b", "b.json", "--m", "3", "--sentence"],
    );
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["tool"], "locality");
    assert_eq!(report["command"], "ef");
    assert_eq!(report["config"]["m"], 3);
    assert_eq!(report["result"]["duplicator_wins"], false);
    assert_eq!(report["result"]["sentence_on_a"], true);
    assert_eq!(report["result"]["sentence_on_b"], false);
    assert!(report["result"]["sentence_rank"].as_u64().unwrap() <= 3);

    let out = locality(dir.path(), &["ef", "--a", "a.json", "--b", "b.json", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["sentence"], Value::Null);
}

#[test]
fn tsv_has_header_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = locality(
        dir.path(),
        &[
            "--format",
            "tsv",
            "threshold",
            "--family",
            "order",
            "--m",
            "2",
            "--horizon",
            "12",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# locality "));
    assert!(lines.next().unwrap().starts_with("# config {"));
    assert_eq!(lines.next().unwrap(), "index\tclass");
    assert!(text.contains("# n_emp\t3"));
}

#[test]
fn hanf_pair_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    for (name, n) in [
        ("p20.json", "20"),
        ("p21.json", "21"),
        ("p3.json", "3"),
        ("p4.json", "4"),
    ] {
        gen(dir.path(), name, &["dipath", n]);
    }
    let pass = locality(
        dir.path(),
        &["hanf-pair", "--a", "p20.json", "--b", "p21.json", "--m", "1"],
    );
    assert_eq!(pass.status.code(), Some(0));
    assert_eq!(json(&pass)["result"]["e"], 8);
    let open = locality(
        dir.path(),
        &["hanf-pair", "--a", "p3.json", "--b", "p4.json", "--m", "1"],
    );
    assert_eq!(open.status.code(), Some(1));
}

#[test]
fn eval_with_assignment() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "p.json", &["dipath", "3"]);
    let yes = locality(
        dir.path(),
        &[
            "eval",
            "--structure",
            "p.json",
            "--formula",
            "(exists y (E x y))",
            "--assign",
            "x=1",
        ],
    );
    assert_eq!(yes.status.code(), Some(0));
    let no = locality(
        dir.path(),
        &[
            "eval",
            "--structure",
            "p.json",
            "--formula",
            "(exists y (E x y))",
            "--assign",
            "x=2",
        ],
    );
    assert_eq!(no.status.code(), Some(1));
    let unbound = locality(dir.path(), &["eval", "--structure", "p.json", "--formula", "(E x y)"]);
    assert_eq!(unbound.status.code(), Some(2));
    assert!(!unbound.stderr.is_empty());
}

#[test]
fn validate_distinguishes_bad_content_from_bad_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"relations":{"E":[[0,5]]},"signature":[{"arity":2,"name":"E"}],"size":3}"#;
    fs::write(dir.path().join("bad.json"), bad).unwrap();
    fs::write(dir.path().join("junk.json"), "not json").unwrap();
    gen(dir.path(), "ok.json", &["gadget", "3"]);
    assert_eq!(locality(dir.path(), &["validate", "ok.json"]).status.code(), Some(0));
    let out = locality(dir.path(), &["validate", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["valid"], false);
    assert_eq!(locality(dir.path(), &["validate", "junk.json"]).status.code(), Some(2));
    assert_eq!(
        locality(dir.path(), &["validate", "missing.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn small_budget_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "a.json", &["cycle", "9"]);
    gen(dir.path(), "b.json", &["cycle", "10"]);
    let out = locality(
        dir.path(),
        &["--budget", "5", "ef", "--a", "a.json", "--b", "b.json", "--m", "3"],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn split_writes_two_components() {
    let dir = tempfile::tempdir().unwrap();
    let out = locality(
        dir.path(),
        &[
            "split",
            "--length",
            "14",
            "--n",
            "1",
            "--pattern",
            "1,0",
            "--out",
            "s.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["components"], 2);
    assert_eq!(locality(dir.path(), &["validate", "s.json"]).status.code(), Some(0));
}

#[test]
fn local_check_finds_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "c.json", &["cycle", "6"]);
    let out = locality(
        dir.path(),
        &[
            "local-check",
            "--formula",
            "(forall y (dist<= 2 x y))",
            "--l",
            "2",
            "--corpus",
            "c.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["witness"]["structure"], 0);
    let out = locality(
        dir.path(),
        &[
            "local-check",
            "--formula",
            "(exists y (E x y))",
            "--l",
            "1",
            "--corpus",
            "c.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
}
