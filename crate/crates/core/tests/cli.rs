use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FIX_B: &str = r#"{"n":3,"mode":"rational","generators":[[["0","1/2","1/2"],["0","1","0"],["0","0","1"]]]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_invariant-ideals"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_fix_b() {
    let dir = TempDir::new().unwrap();
    let sys = write(dir.path(), "fixb.json", FIX_B);
    let dot = dir.path().join("prim.dot");
    let out = run(&["analyze", sys.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    let r = json(&out);
    assert_eq!(r["report_version"], 1);
    let supports: Vec<Value> = r["prim"].as_array().unwrap().iter().map(|p| p["support"].clone()).collect();
    assert_eq!(supports, vec![serde_json::json!([1]), serde_json::json!([2])]);
    assert_eq!(r["center"], serde_json::json!([1, 2]));
    assert_eq!(r["verdict"]["mean_ergodic"], true);
    let dot = std::fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph"));
}

#[test]
fn analyze_single_point_and_rotation() {
    let dir = TempDir::new().unwrap();
    let one = write(dir.path(), "one.json", r#"{"n":1,"generators":[[[1]]]}"#);
    let r = json(&run(&["analyze", one.to_str().unwrap()]));
    assert_eq!(r["prim"].as_array().unwrap().len(), 1);
    assert_eq!(r["center"], serde_json::json!([0]));

    let rot = dir.path().join("rot.json");
    let out = run(&["build", "rotation", "--n", "6", "--a", "2", "--out", rot.to_str().unwrap()]);
    assert!(out.status.success());
    let r = json(&run(&["analyze", rot.to_str().unwrap()]));
    assert_eq!(r["prim"].as_array().unwrap().len(), 2);
}

#[test]
fn rational_reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let sys = write(dir.path(), "fixb.json", FIX_B);
    let a = run(&["analyze", sys.to_str().unwrap()]);
    let b = run(&["analyze", sys.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn radical_sets() {
    let dir = TempDir::new().unwrap();
    let sys = write(dir.path(), "fixb.json", FIX_B);
    let csv = dir.path().join("trace.csv");
    let r = json(&run(&["radical", sys.to_str().unwrap(), "--set", "0,1,2", "--fn", "1,0,0", "--csv", csv.to_str().unwrap()]));
    assert_eq!(r["radical_support"], serde_json::json!([1, 2]));
    let csv = std::fs::read_to_string(csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,decay"));
    for line in lines {
        let (n, d) = line.split_once(',').unwrap();
        let n: f64 = n.parse().unwrap();
        let d: f64 = d.parse().unwrap();
        assert!((d - 1.0 / n).abs() <= 1e-15, "{line}");
    }

    let r = json(&run(&["radical", sys.to_str().unwrap(), "--set", "1"]));
    assert_eq!(r["radical_support"], serde_json::json!([1]));

    let out = run(&["radical", sys.to_str().unwrap(), "--set", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("0 -> 1") || err.contains("0 -> 2"), "{err}");
}

#[test]
fn center_and_meanergodic() {
    let dir = TempDir::new().unwrap();
    let sys = write(dir.path(), "fixb.json", FIX_B);
    let r = json(&run(&["center", sys.to_str().unwrap()]));
    assert_eq!(r["center"], serde_json::json!([1, 2]));
    let r = json(&run(&["meanergodic", sys.to_str().unwrap()]));
    assert_eq!(r["mean_ergodic"], true);
}

#[test]
fn builders_emit_loadable_files() {
    let dir = TempDir::new().unwrap();
    let cases: &[&[&str]] = &[
        &["build", "koopman", "--image", "1,2,3,2"],
        &["build", "ulam", "--map", "doubling", "--cells", "8"],
        &["build", "ulam", "--map", "rotation", "--cells", "4", "--alpha", "1/4"],
        &["build", "random", "--seed", "5"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = run(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let p = write(dir.path(), &format!("b{i}.json"), std::str::from_utf8(&out.stdout).unwrap());
        json(&run(&["analyze", p.to_str().unwrap()]));
    }
    let l = write(dir.path(), "l.json", &String::from_utf8(run(&["build", "rotation", "--n", "2", "--a", "1"]).stdout).unwrap());
    let out = run(&["build", "product", l.to_str().unwrap(), l.to_str().unwrap(), "--kind", "independent"]);
    let spec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(spec["n"], 4);
    assert_eq!(spec["generators"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "--seed", "42", "--count", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all propositions pass"));

    let out = run(&["verify", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));

    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "[{\"n\": 2, \"generators\": ");
    let out = run(&["verify", "--count", "0", "--fixtures", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn error_exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "/nonexistent/system.json"]).status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"n\": 2,\n \"generators\": [[[1, 0], [0, 1]]\n");
    let out = run(&["analyze", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let nonabelian = write(
        dir.path(),
        "na.json",
        r#"{"n":3,"generators":[[[0,1,0],[1,0,0],[0,0,1]],[[0,0,1],[0,1,0],[1,0,0]]]}"#,
    );
    assert_eq!(run(&["analyze", nonabelian.to_str().unwrap()]).status.code(), Some(2));

    let sys = write(dir.path(), "fixb.json", FIX_B);
    let out = run(&["analyze", sys.to_str().unwrap(), "--tol-conv", "-1"]);
    assert_ne!(out.status.code(), Some(0));
}
