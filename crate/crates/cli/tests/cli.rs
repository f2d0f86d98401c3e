use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rabuild"))
}

fn standard() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/standard.json")
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn verify_standard_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&["verify", "--config", standard().to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["radius"], 3);
    let checks = json["checks"].as_array().unwrap();
    assert!(checks.len() >= 8);
    assert!(checks.iter().all(|c| c["passed"] == true && !c["statement"].as_str().unwrap().is_empty()));
}

#[test]
fn verify_cyclic_reports_absence_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "cyclic.json",
        r#"{"schema_version": 1,
            "delta": {"thickness": [4,3,9], "local_groups": {"i": "cyclic", "j": "cyclic"}},
            "tilde": {"thickness": [3,3,12], "local_groups": {"i": "cyclic", "j": "cyclic"}},
            "radius": 2}"#,
    );
    let out = run(&["verify", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let nd: Vec<&Value> = json["checks"].as_array().unwrap().iter().filter(|c| c["name"] == "non-discreteness").collect();
    assert_eq!(nd.len(), 2);
    assert!(nd.iter().all(|c| c["detail"].as_str().unwrap().contains("no witness")));
}

#[test]
fn thickness_equation_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"schema_version": 1, "delta": {"thickness": [4,3,9]}, "tilde": {"thickness": [3,3,11]}}"#,
    );
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("q_i·q_j = 12 but q̃_k = 11"), "{err}");
}

#[test]
fn non_bijective_b_table_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "bad_b.json",
        r#"{"schema_version": 1, "delta": {"thickness": [4,3,9]}, "tilde": {"thickness": [3,3,12]},
            "b": [0, 1, 2, 3, 3, 5, 6, 7, 8]}"#,
    );
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("table `b`"));
}

#[test]
fn explicit_tables_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    // a different but valid pair of block bijections
    let cfg = write_config(
        &dir,
        "tables.json",
        r#"{"schema_version": 1, "delta": {"thickness": [4,3,9]}, "tilde": {"thickness": [3,3,12]},
            "a": [0, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1],
            "b": [0, 8, 7, 6, 5, 4, 3, 2, 1],
            "radius": 2, "sampled_elements": 0}"#,
    );
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn malformed_and_missing_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "junk.json", "{ not json");
    assert_eq!(run(&["verify", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["emit", "ball", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let v2 = write_config(
        &dir,
        "v2.json",
        r#"{"schema_version": 2, "delta": {"thickness": [4,3,9]}, "tilde": {"thickness": [3,3,12]}}"#,
    );
    assert_eq!(run(&["verify", "--config", v2.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn treewall_radius_two_degrees() {
    let out = run(&["emit", "treewall", "--config", standard().to_str().unwrap(), "--radius", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let adjacency = json["adjacency"].as_array().unwrap();
    let degrees: Vec<usize> = adjacency.iter().map(|e| e["neighbours"].as_array().unwrap().len()).collect();
    // valency q_k = 9 on the k side, q_i·q_j = 12 on the {i,j} side
    let valency = |e: &Value| if e["vertex"]["side"] == "K_PANEL" { 9 } else { 12 };
    let mut full = BTreeSet::new();
    for (e, &d) in adjacency.iter().zip(&degrees) {
        assert!(d >= 1 && d <= valency(e), "{e}");
        if d == valency(e) {
            full.insert(d);
        }
        if e["vertex"]["rep"].as_array().unwrap().is_empty() {
            assert_eq!(d, valency(e), "base vertex is interior");
        }
    }
    assert_eq!(full, BTreeSet::from([9, 12]));
    // a tree: |E| = |V| − 1
    let edges: usize = degrees.iter().sum::<usize>() / 2;
    assert_eq!(edges + 1, adjacency.len());
}

#[test]
fn treewall_dot_distinguishes_sides() {
    let out = run(&["emit", "treewall", "--config", standard().to_str().unwrap(), "--radius", "1"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph treewall {"));
    assert!(dot.contains("shape=circle") && dot.contains("shape=diamond"));
}

#[test]
fn ball_radius_zero_is_single_vertex() {
    let out = run(&["emit", "ball", "--config", standard().to_str().unwrap(), "--radius", "0", "--format", "json"]);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["chambers"].as_array().unwrap().len(), 1);
    assert!(json["edges"].as_array().unwrap().is_empty());
    let dot = String::from_utf8(run(&["emit", "ball", "--config", standard().to_str().unwrap(), "--radius", "0"]).stdout).unwrap();
    assert_eq!(dot.matches("label=").count(), 1);
}

#[test]
fn incidence_has_every_vertex_class() {
    let out = run(&["emit", "incidence", "--config", standard().to_str().unwrap(), "--radius", "1", "--format", "json"]);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut classes: BTreeMap<String, usize> = BTreeMap::new();
    for n in json["nodes"].as_array().unwrap() {
        *classes.entry(n["class"].as_str().unwrap().to_string()).or_default() += 1;
    }
    let names: Vec<&str> = classes.keys().map(String::as_str).collect();
    assert_eq!(names, ["chamber", "i_panel", "ij_residue", "j_panel", "k_panel"]);
    let dot = String::from_utf8(run(&["emit", "incidence", "--config", standard().to_str().unwrap(), "--radius", "1"]).stdout).unwrap();
    for class in ["chamber", "i_panel", "j_panel", "k_panel", "ij_residue"] {
        assert!(dot.contains(&format!("class=\"{class}\"")));
    }
}

#[test]
fn emission_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for (what, format) in [("ball", "dot"), ("treewall", "json"), ("incidence", "dot")] {
        let a = dir.path().join(format!("{what}-a.{format}"));
        let b = dir.path().join(format!("{what}-b.{format}"));
        for p in [&a, &b] {
            let out = run(&[
                "emit", what, "--config", standard().to_str().unwrap(), "--radius", "2", "--format", format, "--out", p.to_str().unwrap(),
            ]);
            assert_eq!(out.status.code(), Some(0));
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{what}");
    }
}

#[test]
fn unknown_target_is_rejected() {
    let out = run(&["emit", "chambers", "--config", standard().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["emit", "ball", "--config", standard().to_str().unwrap(), "--format", "svg"]);
    assert_eq!(out.status.code(), Some(2));
}
