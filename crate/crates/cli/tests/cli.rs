use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn maltsev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maltsev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const CAND: &str = "p/3; q/3\np(x,x,y) = p(x,y,y)\np(x,y,x) = q(x,x,y) = q(x,y,x) = q(y,x,x)\n";
const PM_FULL: &str =
    "p/3; q/3\nx = p(x,x,y) = p(x,y,y) = p(x,y,x) = q(x,x,y) = q(x,y,x) = q(y,x,x)\n";
const SUBSET3: &str = "p/3; q/3\np(x,x,y) = p(x,y,y)\np(x,y,x) = q(x,x,y)\nq(x,y,x) = q(y,x,x)\n";

#[test]
fn clone_counts() {
    let o = maltsev(&["clone", "B", "--arity", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("7 operations"), "{}", stdout(&o));

    let o = maltsev(&["clone", "C", "--arity", "3"]);
    assert!(stdout(&o).contains("4 operations"));

    let o = maltsev(&["clone", "A3", "--arity", "2", "--classify"]);
    let out = stdout(&o);
    assert!(out.contains("2 operations"));
    assert_eq!(out.matches("projection").count(), 2);
}

#[test]
fn clone_cap_exceeded_is_a_usage_error() {
    let o = maltsev(&["clone", "A3", "--arity", "3", "--cap", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn clone_json_round_trips() {
    let o = maltsev(&["clone", "C", "--arity", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["members"].as_array().unwrap().len(), 4);
    assert_eq!(v["arity"], 3);
}

#[test]
fn check_reports_witnesses_and_failures() {
    let dir = TempDir::new().unwrap();
    let cand = write(&dir, "s_cand.sys", CAND);
    let full = write(&dir, "s_pm_full.sys", PM_FULL);

    let o = maltsev(&["check", &cand, "B", "--idempotent-only"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("p = meet(x,meet(y,z)), q = meet(x,meet(y,z))"));

    let o = maltsev(&["check", &full, "B"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unsatisfiable"));

    let o = maltsev(&["check", &cand, "CxD"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("p = f(x,x,f(x,y,z)), q = f(x,y,z)"));
}

#[test]
fn affine_verdicts_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cand = write(&dir, "s_cand.sys", CAND);
    let sub = write(&dir, "subset3.sys", SUBSET3);
    let triv = write(&dir, "trivial_proj.sys", "p/3; p(x,y,y) = p(x,y,x)\n");

    let o = maltsev(&["affine", &cand, "--all-rings", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "unrealizable");
    assert_eq!(v["brute_bound"], 50);

    let o = maltsev(&["affine", &sub, "--modulus", "5", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["witness"]["p"], serde_json::json!([1, 0, 0]));
    assert_eq!(v["witness"]["q"], serde_json::json!([3, 3, 0]));

    let o = maltsev(&["affine", &sub, "--modulus", "2"]);
    assert_eq!(o.status.code(), Some(1));

    let o = maltsev(&["affine", &triv, "--all-rings", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["witness"]["p"], serde_json::json!([1, 0, 0]));
}

#[test]
fn text_and_json_agree() {
    let dir = TempDir::new().unwrap();
    let sub = write(&dir, "subset3.sys", SUBSET3);
    let text = stdout(&maltsev(&["affine", &sub, "--all-rings"]));
    let v: serde_json::Value =
        serde_json::from_slice(&maltsev(&["affine", &sub, "--all-rings", "--json"]).stdout)
            .unwrap();
    assert!(text.contains(&format!("realizable mod {}", v["modulus"])));
    let q: Vec<u64> = serde_json::from_value(v["witness"]["q"].clone()).unwrap();
    assert!(text.contains(&format!("{q:?}")));
}

#[test]
fn usage_and_validation_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.sys", "p/3; p(x,y) = x\n");
    let o = maltsev(&["affine", &bad, "--all-rings"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:6"));

    assert_eq!(maltsev(&["clone", "nowhere.json"]).status.code(), Some(2));
    assert_eq!(maltsev(&["classify"]).status.code(), Some(2));
    assert_eq!(maltsev(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        maltsev(&["classify", "--class", "three-ternary"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn algebra_json_files_are_accepted() {
    let dir = TempDir::new().unwrap();
    let alg =
        r#"{"name": "meet", "size": 2, "ops": [{"name": "m", "arity": 2, "table": [0, 0, 0, 1]}]}"#;
    let path = write(&dir, "meet.json", alg);
    let o = maltsev(&["clone", &path, "--arity", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("7 operations"));
}

#[test]
fn classify_one_class() {
    let o = maltsev(&["classify", "--class", "one-ternary"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0 survivors"));

    let o = maltsev(&["classify", "--class", "two-ternary", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let survivors = v["survivors"].as_array().unwrap();
    assert_eq!(survivors.len(), 3);
    let mut names: Vec<&str> = survivors
        .iter()
        .map(|s| s["known_as"].as_str().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["candidate", "maj", "new"]);
}

#[test]
fn classify_full_writes_a_deterministic_report() {
    let dir = TempDir::new().unwrap();
    let paths: Vec<_> = ["a.json", "b.json"]
        .iter()
        .map(|n| dir.path().join(n))
        .collect();
    for p in &paths {
        let o = maltsev(&["classify", "--full", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(!stdout(&o).contains("FINDING"));
    }
    let read = |p: &Path| fs::read_to_string(p).unwrap();
    assert_eq!(read(&paths[0]), read(&paths[1]));
    let v: serde_json::Value = serde_json::from_str(&read(&paths[0])).unwrap();
    let finals = v["final_candidates"].as_array().unwrap();
    assert_eq!(finals.len(), 1);
    assert_eq!(v["findings"], serde_json::json!([]));
    let chains = finals[0]["chains"].as_array().unwrap();
    assert!(chains.iter().any(|c| c == "q(x,y,x) = q(x,y,y)"));
}

#[test]
fn fmt_round_trips_and_canonicalizes() {
    let dir = TempDir::new().unwrap();
    let cand = write(&dir, "s_cand.sys", CAND);
    let permuted = write(
        &dir,
        "perm.sys",
        "p/3; q/3\nq(x,x,y) = q(x,y,y)\nq(x,y,x) = p(x,x,y) = p(x,y,x) = p(y,x,x)\n",
    );
    let once = stdout(&maltsev(&["fmt", &cand]));
    let again_path = write(&dir, "again.sys", &once);
    assert_eq!(stdout(&maltsev(&["fmt", &again_path])), once);

    let a = stdout(&maltsev(&["fmt", &cand, "--canonical"]));
    let b = stdout(&maltsev(&["fmt", &permuted, "--canonical"]));
    assert_eq!(a, b);
}
