use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verikit")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let code = out.status.code().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (code, value)
}

fn fixture(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn residues_prime_7() {
    let (code, v) = run_json(&["residues", "--prime", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["details"]["product_mod_p"], 2);
    assert_eq!(v["details"]["A"], serde_json::json!([5, 6]));
    assert_eq!(v["details"]["B"], serde_json::json!([0, 2, 4]));
    assert_eq!(v["details"]["bijection_ok"], true);
}

#[test]
fn residues_sweep() {
    let (code, v) = run_json(&["residues", "--prime", "3", "--sweep-max", "997"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["sweep"]["prime_count"], 167);
    assert_eq!(v["details"]["bijection_ok"], Value::Null);
}

#[test]
fn residues_rejects_non_prime() {
    let out = run(&["residues", "--prime", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an odd prime"));
}

#[test]
fn beams_search_n2() {
    let (code, v) = run_json(&["beams", "search", "--n", "2", "--max", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["minimum"], 3);
    let (code, v) = run_json(&["beams", "search", "--n", "2", "--max", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["minimum"], Value::Null);
}

#[test]
fn beams_search_too_large_is_resource_exceeded() {
    assert_eq!(run(&["beams", "search", "--n", "6", "--max", "9"]).status.code(), Some(3));
}

#[test]
fn beams_construct_and_check() {
    let (code, v) = run_json(&["beams", "construct", "--n", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["beam_count"], 15);

    let good = fixture(
        "beams_good.json",
        r#"{"n": 2, "beams": [{"axis":"x","a":1,"b":1},{"axis":"y","a":1,"b":2},{"axis":"z","a":2,"b":2}]}"#,
    );
    let (code, v) = run_json(&["beams", "check", "--file", good.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");

    let bad = fixture("beams_bad.json", r#"{"n": 2, "beams": [{"axis":"x","a":1,"b":1}]}"#);
    let (code, v) = run_json(&["beams", "check", "--file", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "fail");

    let malformed = fixture("beams_malformed.json", r#"{"n": 3, "beams": []}"#);
    assert_eq!(run(&["beams", "check", "--file", malformed.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["beams", "check", "--file", "/nonexistent/x.json"]).status.code(), Some(2));
}

#[test]
fn pairs_commands() {
    let (code, v) = run_json(&["pairs", "construct", "--n", "100"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["count"], 197);

    let pts = fixture("pairs.json", r#"{"points": [[0,1],[1,0],[1,1]]}"#);
    let (code, v) = run_json(&["pairs", "count", "--file", pts.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["count"], 3);

    let (code, v) = run_json(&["pairs", "brute", "--n", "3", "--bound", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["max_count"], 3);

    let (code, v) = run_json(&["pairs", "farey", "--order", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["length"], 11);
    assert_eq!(v["details"]["neighbors_match_adjacency"], true);
}

#[test]
fn overdet_commands() {
    let (code, v) = run_json(&["overdet", "construct", "--n", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["total"], 502);

    let pts = fixture("overdet.json", r#"{"points": [["1","2"],["2","1"],["3","1"],["4","1"]]}"#);
    let (code, v) = run_json(&["overdet", "check", "--file", pts.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["interpolation"]["polynomial"], serde_json::json!(["5", "-13/3", "3/2", "-1/6"]));
    assert_eq!(v["details"]["overdetermined"], false);

    let (code, v) = run_json(&["overdet", "count", "--file", pts.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["total"], 4);

    let (code, v) = run_json(&["overdet", "brute", "--n", "3", "--xmax", "3", "--ymax", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["max_count"], 1);
}

#[test]
fn geo_scan() {
    let (code, v) = run_json(&["geo", "scan", "--triangle", "-3,-4,3,-4,1,4.898979485566356", "--samples", "256"]);
    assert_eq!(code, 0, "{v}");
    assert!(v["details"]["perpendicularity_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(run(&["geo", "scan", "--triangle", "0,0,4,0,1,1"]).status.code(), Some(2));
    assert_eq!(run(&["geo", "scan", "--triangle", "1,2,3"]).status.code(), Some(2));
}

#[test]
fn ineq_commands() {
    assert_eq!(run(&["ineq", "sample", "--n", "4", "--trials", "10"]).status.code(), Some(2));
    let (code, v) = run_json(&["ineq", "sample", "--n", "4", "--trials", "200", "--seed", "42"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["violations"], 0);
    let (_, again) = run_json(&["--seed", "42", "ineq", "sample", "--n", "4", "--trials", "200"]);
    assert_eq!(v, again);

    let (code, v) = run_json(&["ineq", "permsums", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["pairs"][0]["sum_f_squared"], "8");
    assert_eq!(run(&["ineq", "permsums", "--n", "9"]).status.code(), Some(3));

    let h = "0.7071067811865476";
    let xy = fixture("xy.json", &format!(r#"{{"x": ["{h}", "-{h}"], "y": ["{h}", "-{h}"]}}"#));
    let (code, v) = run_json(&["ineq", "check", "--file", xy.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    let exact = fixture("xy_exact.json", r#"{"x": ["1/2","1/2","-1/2","-1/2"], "y": ["1","0","0","-1"]}"#);
    let (code, v) = run_json(&["ineq", "check", "--exact", "--file", exact.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    let unsorted = fixture("xy_bad.json", r#"{"x": ["-1","1"], "y": ["1","-1"]}"#);
    let out = run(&["ineq", "check", "--exact", "--file", unsorted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-increasing"));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["beams", "search", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["--time-limit-secs", "-1", "residues", "--prime", "7"]).status.code(), Some(2));
}

#[test]
fn json_is_deterministic_and_timing_is_opt_in() {
    let a = run(&["--json", "pairs", "farey", "--order", "7"]).stdout;
    let b = run(&["--json", "pairs", "farey", "--order", "7"]).stdout;
    assert_eq!(a, b);
    assert!(!String::from_utf8(a).unwrap().contains("elapsed_ms"));
    let (_, v) = run_json(&["--timing", "pairs", "farey", "--order", "7"]);
    assert!(v["elapsed_ms"].is_number());
}

#[test]
fn all_with_config() {
    let cfg = fixture(
        "suite.json",
        r#"{"geo": {"scenes": 2, "thetas": 10, "samples": 128},
            "beams": {"construct_max": 10, "large_n": null, "search_n4": false},
            "pairs": {"construct_max": 20, "farey_max": 10, "neighbor_max": 8},
            "overdet": {"construct_max": 8},
            "ineq": {"n_max": 6, "trials": 50}}"#,
    );
    let (code, v) = run_json(&["all", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    let sections = v["details"]["sections"].as_array().unwrap();
    let names: Vec<&str> = sections.iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["geo", "beams", "residues", "pairs", "overdet", "ineq"]);
    assert!(sections.iter().all(|s| s["verdict"] == "pass"));
    let residues = &sections[2]["checks"][0]["details"];
    assert_eq!(residues["prime_count"], 167);
    let n4 = sections[1]["checks"].as_array().unwrap().iter().find(|c| c["name"] == "search n = 4").unwrap();
    assert_eq!(n4["verdict"], "skipped");

    let disabled = fixture(
        "suite_off.json",
        r#"{"geo": {"enabled": false}, "beams": {"enabled": false},
        "residues": {"enabled": false}, "pairs": {"enabled": false}, "overdet": {"enabled": false},
        "ineq": {"enabled": false}}"#,
    );
    let (code, v) = run_json(&["all", "--config", disabled.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "skipped");

    let unknown = fixture("suite_bad.json", r#"{"nope": {}}"#);
    assert_eq!(run(&["all", "--config", unknown.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn all_failing_check_exits_one() {
    let cfg = fixture(
        "suite_fail.json",
        r#"{"geo": {"enabled": false}, "beams": {"enabled": false}, "residues": {"enabled": false},
            "pairs": {"construct_max": 5, "brute": [[3, 3, 4]], "farey_max": 3, "neighbor_max": 3},
            "overdet": {"enabled": false}, "ineq": {"enabled": false}}"#,
    );
    let (code, v) = run_json(&["all", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "fail");
}
