use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn edgelink(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgelink")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn digest(path: &Path) -> String {
    let bytes = fs::read(path).unwrap();
    format!("{:x}", Sha256::digest(bytes))
}

const K4_PLUS: &str = "0 1\n1 2\n2 3\n3 0\n0 2\n1 3\n0 1\n2 3\n";

#[test]
fn counterexample_writes_instance_and_infeasible_verdict() {
    let tmp = TempDir::new().unwrap();
    let o = edgelink(&["linkage", "counterexample", "--k", "2", "--out", "cx"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let inst: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("cx/instance.json")).unwrap()).unwrap();
    assert_eq!(inst["graph"]["vertices"].as_array().unwrap().len(), 4);
    let o = edgelink(&["verify", "cx/infeasible.json"], tmp.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verified"));
}

#[test]
fn tampered_linkage_is_rejected_with_shared_edge() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("g.txt"), K4_PLUS).unwrap();
    let o = edgelink(&["--graph", "g.txt", "linkage", "solve", "--pair", "0-2", "--pair", "1-3", "--out", "l"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&edgelink(&["linkage", "verify", "l/linkage.json"], tmp.path())), 0);

    let path = tmp.path().join("l/linkage.json");
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let paths = doc["certificate"]["linkage"]["paths"].as_array_mut().unwrap();
    let first = paths[0].clone();
    paths[1] = first;
    doc["certificate"]["pairs"][1] = doc["certificate"]["pairs"][0].clone();
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();

    let o = edgelink(&["verify", "l/linkage.json"], tmp.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("shared edge"));
}

#[test]
fn equal_configs_give_identical_certificates() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("grid.json"), r#"{"family":"grid"}"#).unwrap();
    for out in ["a", "b"] {
        let o = edgelink(&["--family", "grid.json", "--seed", "7", "fan", "--m", "3", "--out", out], tmp.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let o = edgelink(&["--family", "grid.json", "orient", "infinite", "--k", "1", "--rounds", "2", "--out", out], tmp.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["fan.json", "orient-run.json", "orientation.dot"] {
        assert_eq!(digest(&tmp.path().join("a").join(f)), digest(&tmp.path().join("b").join(f)), "{f}");
    }
    assert_eq!(code(&edgelink(&["verify", "a/orient-run.json"], tmp.path())), 0);
    assert_eq!(code(&edgelink(&["verify", "a/fan.json"], tmp.path())), 0);
}

#[test]
fn usage_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&edgelink(&["bogus"], tmp.path())), 2);
    assert_eq!(code(&edgelink(&["connectivity"], tmp.path())), 2);
    assert_eq!(code(&edgelink(&["experiment", "liftgraph", "--k", "3"], tmp.path())), 2);
}

#[test]
fn exhausted_budget_is_not_a_disproof() {
    let tmp = TempDir::new().unwrap();
    let inst = r#"{"family":{"family":"grid"},"k":1,"terminals":[[{"pos":[0,0],"cell":0},{"pos":[3,2],"cell":0}]]}"#;
    fs::write(tmp.path().join("inst.json"), inst).unwrap();
    let o = edgelink(&["--depth", "8", "--depth-cap", "8", "--budget-nodes", "1", "linkage", "solve", "inst.json"], tmp.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = edgelink(&["linkage", "solve", "inst.json", "--out", "l"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&edgelink(&["verify", "l/linkage.json"], tmp.path())), 0);
}

#[test]
fn finite_commands_emit_verifiable_certificates() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("g.txt"), K4_PLUS).unwrap();
    for (args, file) in [
        (vec!["connectivity"], "connectivity.json"),
        (vec!["split", "--s", "0", "--k", "2"], "split.json"),
        (vec!["orient", "finite", "--k", "1"], "orientation.json"),
    ] {
        let mut full = vec!["--graph", "g.txt", "--out", "o"];
        full.extend(args);
        let o = edgelink(&full, tmp.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let o = edgelink(&["verify", &format!("o/{file}")], tmp.path());
        assert_eq!(code(&o), 0, "{file}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = edgelink(&["--graph", "g.txt", "liftgraph", "--s", "0", "--k", "2"], tmp.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("class_tag"));
}

#[test]
fn liftgraph_experiment_has_no_other_class() {
    let tmp = TempDir::new().unwrap();
    let o = edgelink(&["experiment", "liftgraph", "--n", "60", "--k", "4", "--out", "e"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(tmp.path().join("e/liftgraph-summary.json")).unwrap();
    assert!(!summary.contains("Other"));
    let lines = fs::read_to_string(tmp.path().join("e/liftgraph.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 60);
}
