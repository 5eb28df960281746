use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylhyp")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn orbits_have_sizes_12_12_32() {
    let v = json(&["orbits"]);
    let len = |k: &str| v[k].as_array().unwrap().len();
    assert_eq!((len("blue"), len("red"), len("J")), (12, 12, 32));
    assert!(v["blue"].as_array().unwrap().contains(&Value::from("+v(0,7)")));
}

#[test]
fn distance_between_opposite_labels() {
    assert_eq!(json(&["distance", "+v(0,1)", "-v(0,1)"])["distance"], 6);
    assert_eq!(json(&["distance", "p0", "p0"])["distance"], 0);
    let out = run(&["distance", "+v(0,1)", "p0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_t_space() {
    let v = json(&["classify", "--space", "T"]);
    assert_eq!(v["total"], 13244);
    let orbits = v["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 18);
    let count = |p: &str| orbits.iter().filter(|o| o["tag"].as_str().unwrap().starts_with(p)).count();
    assert_eq!((count("LLL"), count("LLJ"), count("LJJ"), count("JJJ")), (2, 4, 7, 5));
}

#[test]
fn group_order_and_guard() {
    assert_eq!(json(&["group-order", "G_L"])["order"], 1920);
    let out = run(&["group-order", "H"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("force"));
}

#[test]
fn table_has_56_rows() {
    let v = json(&["table"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 56);
    assert_eq!(rows[0]["label"], "+v(0,1)");
    assert_eq!(rows[0]["target_label"], "p0");
    let base = rows.iter().find(|r| r["label"] == "+v(0,7)").unwrap();
    assert_eq!(base["color"], "blue");
    assert_eq!(base["word"], "");
}

#[test]
fn eval_from_point_file() {
    let dir = std::env::temp_dir().join(format!("weylhyp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("point.json");
    std::fs::write(
        &path,
        r#"{"A":[0.31,0.12],"B":[0.47,-0.2],"C":[0.62,0.05],"D":[0.28,0.1],"E":[0.83,-0.07],"F":[0.55,0.22]}"#,
    )
    .unwrap();
    let v = json(&["eval", "--func", "J", "--point", path.to_str().unwrap()]);
    let re = v["value"][0].as_f64().unwrap();
    let im = v["value"][1].as_f64().unwrap();
    assert!((re - 0.0130340678943445958878).abs() < 1e-12);
    assert!((im - 0.0467104053989149052620).abs() < 1e-12);
    assert_eq!(v["label"], "p0");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn eval_is_seed_reproducible() {
    let a = run(&["--format", "json", "eval", "--func", "M", "--seed", "3"]);
    let b = run(&["--format", "json", "eval", "--func", "M", "--seed", "3"]);
    let c = run(&["--format", "json", "eval", "--func", "M", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_keys_are_sorted() {
    let out = run(&["--format", "json", "eval", "--func", "L"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(keys.contains(&"err_estimate"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["eval", "--func", "J", "--args", "A,B,C"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--func", "J", "--point", "/nonexistent/p.json"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--func", "M", "--args", "a,b,c,d,e,f,g,g"]).status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(run(&["orbits", "--bogus"]).status.code(), Some(2));
}

#[test]
fn check_suites_pass_at_default_seed() {
    for suite in ["invariance", "relations", "limits", "pipeline"] {
        let out = run(&["check", suite]);
        assert!(out.status.success(), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn relation_reports_include_log_spread() {
    let v = json(&["check", "relations"]);
    for rel in v.as_array().unwrap() {
        assert_eq!(rel["pass"], true);
        for r in rel["reports"].as_array().unwrap() {
            assert!(r["residual"].is_number() && r["log_spread"].is_number());
        }
    }
}

#[test]
fn failed_check_exits_1() {
    let out = run(&["check", "pipeline", "--halving", "0.45", "0.46"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["check", "relations", "--tol-m-relation", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_is_idempotent() {
    let a = run(&["--format", "json", "selftest", "--only", "1", "--only", "4", "--only", "9", "--only", "11"]);
    let b = run(&["--format", "json", "selftest", "--only", "1", "--only", "4", "--only", "9", "--only", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["criteria"].as_array().unwrap().len(), 4);
    assert_eq!(v["pass"], true);
}

#[test]
fn unknown_criterion_is_an_input_error() {
    assert_eq!(run(&["selftest", "--only", "16"]).status.code(), Some(2));
}
