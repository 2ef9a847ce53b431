use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conic-feas")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn verdicts(v: &Value) -> Vec<(Value, Value)> {
    v["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["beta"].clone(), r["verdict"].clone()))
        .collect()
}

// Drops the timing fields, which are the only nondeterministic output.
fn strip_timing(mut v: Value) -> Value {
    v["wall_ms"] = Value::Null;
    v["trace"] = Value::Null;
    v
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_i1_is_certified() {
    let out = run(&["solve", path(&fixture("i1.json"))]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["engine"], "f");
    assert_eq!(v["kbar"], 5);
    assert_eq!(v["kbar_certified"], true);
    assert_eq!(v["summary"]["total"], 36);
    assert_eq!(v["summary"]["feasible"], 21);
    let pool: Vec<&Value> = v["pool"].as_array().unwrap().iter().map(|e| &e["beta"]).collect();
    assert_eq!(pool.len(), 6);
}

#[test]
fn solve_i2_needs_kbar() {
    let f = fixture("i2.json");
    assert_eq!(code(&run(&["solve", path(&f)])), 3);
    let out = run(&["solve", path(&f), "--kbar", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["kbar_certified"], false);
    assert_eq!(v["bound"], "heuristic — convergence not certified");
    let rec = &v["records"][0];
    assert_eq!(rec["beta"], serde_json::json!([4, -5]));
    assert_eq!(rec["verdict"], "feasible");
    assert_eq!(rec["first_feasible_k"], 3);
    assert_eq!(rec["witness"], serde_json::json!([3]));
    let at2 = json(&run(&["solve", path(&f), "--kbar", "2"]));
    assert_eq!(at2["records"][0]["verdict"], "infeasible");
}

#[test]
fn bad_input_names_the_field() {
    let out = run(&["solve", path(&fixture("bad.json"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("A[0][0]"));
    assert_eq!(code(&run(&["solve", "/nonexistent/instance.json"])), 2);
}

#[test]
fn oversized_box_exits_4() {
    let f = fixture("oversized.json");
    assert_eq!(code(&run(&["solve", path(&f)])), 4);
    assert_eq!(code(&run(&["oracle", path(&f), "--k", "1"])), 4);
}

#[test]
fn oracle_budget_exits_4() {
    let out = run(&["oracle", path(&fixture("i1.json")), "--k", "50", "--budget", "10"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn oracle_matches_solve() {
    let f = fixture("i1.json");
    let solved = json(&run(&["solve", path(&f)]));
    let oracle = run(&["oracle", path(&f), "--k", "5"]);
    assert_eq!(code(&oracle), 0);
    let oracle = json(&oracle);
    assert!(oracle.get("pool").is_none());
    assert_eq!(verdicts(&solved), verdicts(&oracle));
}

#[test]
fn oracle_at_zero_is_cone_membership() {
    let v = json(&run(&["oracle", path(&fixture("i1.json")), "--k", "0"]));
    for r in v["records"].as_array().unwrap() {
        let b: Vec<i64> = serde_json::from_value(r["beta"].clone()).unwrap();
        let expected = if b.iter().all(|&x| x >= 0) { "feasible" } else { "infeasible" };
        assert_eq!(r["verdict"], expected, "{b:?}");
    }
}

#[test]
fn every_fixture_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    for (name, extra) in [
        ("i1.json", &[][..]),
        ("i2.json", &["--kbar", "3"][..]),
        ("polyhedral.json", &[][..]),
        ("mixed.json", &[][..]),
        ("free.json", &[][..]),
        ("psd.json", &[][..]),
        ("i1.json", &["--engine", "g"][..]),
        ("mixed.json", &["--engine", "g", "--threads", "2"][..]),
    ] {
        let f = fixture(name);
        let out_path = dir.path().join(format!("{name}.{}.out", extra.len()));
        let mut args = vec!["solve", path(&f), "--out", out_path.to_str().unwrap()];
        args.extend_from_slice(extra);
        let solved = run(&args);
        assert_eq!(code(&solved), 0, "{name} {extra:?}: {}", String::from_utf8_lossy(&solved.stderr));
        let verified = run(&["verify", path(&f), out_path.to_str().unwrap()]);
        assert_eq!(code(&verified), 0, "{name} {extra:?}: {}", String::from_utf8_lossy(&verified.stdout));
    }
}

#[test]
fn mutated_results_fail_verification() {
    let f = fixture("i1.json");
    let solved = json(&run(&["solve", path(&f)]));
    let dir = tempfile::tempdir().unwrap();

    let mut no_zero = solved.clone();
    no_zero["pool"].as_array_mut().unwrap().retain(|e| e["beta"] != serde_json::json!([0, 0]));
    let p = dir.path().join("no_zero.json");
    std::fs::write(&p, no_zero.to_string()).unwrap();
    assert_eq!(code(&run(&["verify", path(&f), p.to_str().unwrap()])), 5);

    let mut flipped = solved;
    for r in flipped["records"].as_array_mut().unwrap() {
        if r["beta"] == serde_json::json!([2, -3]) {
            r["verdict"] = Value::from("feasible");
        }
    }
    let p = dir.path().join("flipped.json");
    std::fs::write(&p, flipped.to_string()).unwrap();
    let out = run(&["verify", path(&f), p.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stdout).contains("[2, -3]"));
}

#[test]
fn runs_are_deterministic() {
    for args in [&["solve"][..], &["solve", "--engine", "g"][..], &["solve", "--threads", "3"][..]] {
        let f = fixture("mixed.json");
        let mut full = args.to_vec();
        full.push(path(&f));
        let a = strip_timing(json(&run(&full)));
        let b = strip_timing(json(&run(&full)));
        assert_eq!(a, b);
    }
    let f = fixture("mixed.json");
    let seq = strip_timing(json(&run(&["solve", path(&f)])));
    let par = strip_timing(json(&run(&["solve", path(&f), "--threads", "3"])));
    assert_eq!(seq, par);
}

#[test]
fn trace_goes_to_stderr() {
    let out = run(&["solve", path(&fixture("i1.json")), "--trace"]);
    let err = String::from_utf8_lossy(&out.stderr);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("k=5 |C|=6 |B|=6 solved=21/36 elapsed_ms="), "{}", lines[5]);
}
