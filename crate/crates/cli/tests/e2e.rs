//! Runs the `fermat` binary and checks output and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fermat(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fermat"));
    cmd.args(args);
    for var in ["FERMAT_MAX_SPAIRS", "FERMAT_MAX_SNF_COLS"] {
        cmd.env_remove(var);
    }
    cmd.envs(env.iter().copied());
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fermat(args, &[]);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], env: &[(&str, &str)]) -> i32 {
    fermat(args, env).status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn no_timings(mut v: Value) -> Value {
    v["timings_ms"] = Value::Object(Default::default());
    v
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn golden(name: &str) -> Value {
    read(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name))
}

#[test]
fn partitions() {
    assert_eq!(ok(&["partitions", "--n", "2"]).lines().count(), 3);
    assert_eq!(json(&["partitions", "--n", "4", "--json"]).as_array().unwrap().len(), 15);
    assert_eq!(ok(&["partitions", "--n", "0"]).trim(), "+1 0-1");
    assert_eq!(code(&["partitions", "--n", "3"], &[]), 1);
}

#[test]
fn rank() {
    let out = ok(&["rank", "--n", "2", "--m", "3"]);
    assert!(out.contains("gamma=6\nrank=7\n") && out.contains("cross_check=ok"), "{out}");
    let out = ok(&["rank", "--n", "2", "--m", "4"]);
    assert!(out.contains("gamma=19\nrank=20\n") && out.contains("cross_check=ok"), "{out}");
    let v = json(&["rank", "--n", "4", "--m", "3", "--K", "standard", "--json"]);
    assert_eq!((v["gamma"].as_u64(), v["rank"].as_u64()), (Some(8), Some(9)));
    assert!(v.get("cross_check").is_none());
    let v = json(&["rank", "--n", "6", "--m", "5", "--json"]);
    assert_eq!(v["cross_check"]["consistent"], true);
}

#[test]
fn check() {
    assert!(ok(&["check", "--n", "4", "--m", "3"]).ends_with("verdict   PRIMITIVE\n"));
    let v = json(&["check", "--n", "2", "--m", "3", "--snf", "--json"]);
    assert_eq!(v["verdict"], "PRIMITIVE");
    assert_eq!(v["torsion_factors"], Value::Array(vec![]));
    let v = json(&["check", "--n", "6", "--m", "4", "--engine", "both", "--json"]);
    assert_eq!(no_timings(v), golden("n6_m4.json"));
    let v = json(&["check", "--n", "2", "--m", "4", "--K", "0-1,2-3", "--json"]);
    assert_eq!((v["K"].as_str(), v["d0"].as_u64(), v["dp"]["2"].as_u64()), (Some("standard"), Some(18), Some(18)));
}

#[test]
fn budget_exhaustion_is_exit_2() {
    let args = ["check", "--n", "4", "--m", "5", "--engine", "groebner", "--json"];
    let out = fermat(&args, &[("FERMAT_MAX_SPAIRS", "5")]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "INCONCLUSIVE(buchberger)");
    assert!(v.get("dp").unwrap().as_object().unwrap().is_empty());
    let snf = ["torsion", "--n", "4", "--m", "3", "--route", "b"];
    assert_eq!(code(&snf, &[("FERMAT_MAX_SNF_COLS", "10")]), 2);
}

#[test]
fn usage_errors_are_exit_1() {
    assert_eq!(code(&["check", "--n", "4"], &[]), 1);
    assert_eq!(code(&["check", "--n", "4", "--m", "2"], &[]), 1);
    assert_eq!(code(&["check", "--n", "4", "--m", "3", "--K", "0-1,2-3"], &[]), 1);
    assert_eq!(code(&["check", "--n", "2", "--m", "3", "--engine", "fast"], &[]), 1);
    assert_eq!(code(&["scan", "--grid", "4:x"], &[]), 1);
    assert_eq!(code(&["torsion", "--n", "6", "--m", "5", "--route", "a"], &[]), 1);
    assert_eq!(code(&["check", "--n", "2", "--m", "3"], &[("FERMAT_MAX_BASIS", "many")]), 1);
    assert_eq!(code(&["frobnicate"], &[]), 1);
    assert_eq!(code(&["--help"], &[]), 0);
}

#[test]
fn torsion() {
    assert_eq!(ok(&["torsion", "--n", "2", "--m", "3", "--route", "d"]).trim(), "[]");
    assert_eq!(ok(&["torsion", "--n", "2", "--m", "3", "--route", "b"]).trim(), "[]");
    assert_eq!(ok(&["torsion", "--n", "2", "--m", "3", "--route", "a"]).trim(), "[]");
    assert_eq!(ok(&["torsion", "--n", "0", "--m", "5", "--route", "d"]).trim(), "[]");
    let v = json(&["torsion", "--n", "4", "--m", "3", "--K", "standard", "--json"]);
    assert_eq!(v["torsion_factors"], Value::Array(vec![]));
}

#[test]
fn scan_writes_reports_and_reuses_them() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = out.to_str().unwrap();
    let table = ok(&["scan", "--grid", "4:3-5", "--engine", "both", "--out", o]);
    assert_eq!(table.matches("PRIMITIVE").count(), 3);
    for m in 3..=5 {
        let name = format!("n4_m{m}.json");
        assert_eq!(no_timings(read(&out.join(&name))), golden(&name));
    }
    let csv = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",false")));

    // Same inputs: served from the cache, byte for byte.
    let before = std::fs::read(out.join("n4_m5.json")).unwrap();
    ok(&["scan", "--grid", "4:3-5", "--engine", "both", "--out", o]);
    let csv = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    assert_eq!(std::fs::read(out.join("n4_m5.json")).unwrap(), before);

    // Different engine means a different key; --force ignores the cache.
    ok(&["scan", "--grid", "4:3", "--engine", "linear", "--out", o]);
    assert!(std::fs::read_to_string(out.join("summary.csv")).unwrap().contains(",false"));
    ok(&["scan", "--grid", "4:3-5", "--engine", "both", "--out", o, "--force"]);
    let csv = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",false")));
}

#[test]
fn scan_grids() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    assert_eq!(ok(&["scan", "--grid", "2:3-10", "--out", o]).matches("PRIMITIVE").count(), 8);
    ok(&["scan", "--grid", "8:3,6:3", "--engine", "both", "--out", o]);
    assert_eq!(no_timings(read(&dir.path().join("n8_m3.json"))), golden("n8_m3.json"));
    assert_eq!(no_timings(read(&dir.path().join("n6_m3.json"))), golden("n6_m3.json"));
}

#[test]
fn scan_with_inconclusive_instance_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["scan", "--grid", "2:3,4:5", "--engine", "groebner", "--out", dir.path().to_str().unwrap()];
    let out = fermat(&args, &[("FERMAT_MAX_SPAIRS", "40")]);
    assert_eq!(out.status.code(), Some(2));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("PRIMITIVE") && table.contains("INCONCLUSIVE(buchberger)"), "{table}");
}

#[test]
fn golden_reports_are_consistent() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let v = read(&entry.unwrap().path());
        let (gamma, d0) = (v["gamma"].as_u64().unwrap(), v["d0"].as_u64().unwrap());
        let (n, m) = (v["n"].as_u64().unwrap() as u32, v["m"].as_u64().unwrap());
        assert_eq!(v["rank"].as_u64(), Some(gamma + 1));
        assert_eq!(gamma + d0, (m - 1).pow(n + 1));
        assert!(v["dp"].as_object().unwrap().values().all(|d| d.as_u64() == Some(d0)));
        assert_eq!(v["verdict"], "PRIMITIVE");
        count += 1;
    }
    assert_eq!(count, 10);
}
