use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_stframe");

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--json", "-"]);
    let out = run(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    (out.status.code().unwrap(), serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}")))
}

#[test]
fn identity_passes_on_a_group_metric() {
    let (code, v) = report(&["identity", "--input", &data("solvable-s2-1.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["verdicts"]["identity_ok"], true);
    assert_eq!(v["exit_code"], 0);
}

#[test]
fn check_rejects_a_non_weakly_einstein_product() {
    let (code, v) = report(&["check", "--input", &data("product-1-2.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["verdicts"]["weakly_einstein"], false);
    let diag: Vec<f64> = (0..4).map(|i| v["residuals"]["weakly_einstein"]["matrix"][i][i].as_f64().unwrap()).collect();
    for (got, want) in diag.iter().zip([-3.0, -3.0, 3.0, 3.0]) {
        assert!((got - want).abs() < 1e-10, "{diag:?}");
    }
}

#[test]
fn check_reports_the_forbidden_pattern() {
    let (code, v) = report(&["check", "--gallery", "example-spaceform"]);
    assert_eq!(code, 1);
    assert_eq!(v["forbidden_pattern"], 1);
}

#[test]
fn frame_on_the_group_metric() {
    let (code, v) = report(&["frame", "--input", &data("example4.json")]);
    assert_eq!(code, 0);
    assert!(v["penalty"].as_f64().unwrap() < 1e-16);
    assert_eq!(v["st_frame"].as_array().unwrap().len(), 16);
    let cases: Vec<&str> = v["sign_cases"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert!(cases.contains(&"(v)"), "{cases:?}");
}

#[test]
fn frame_search_failure_exits_three() {
    let out = run(&["frame", "--input", &data("product-1-2.json")]);
    assert_eq!(out.status.code(), Some(1));
    // A loose tolerance lets the weakly Einstein gate pass, but no ST frame exists.
    let out = run(&["frame", "--input", &data("product-1-2.json"), "--tol", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("stframe frame: "));
}

#[test]
fn invariants_with_volume_from_the_input() {
    let (code, v) = report(&["invariants", "--input", &data("sphere-times-genus2.json")]);
    assert_eq!(code, 0);
    let inv = &v["invariants"];
    assert!((inv["chi"].as_f64().unwrap() + 4.0).abs() < 1e-9);
    assert!(inv["p1"].as_f64().unwrap().abs() < 1e-9);
    assert!((inv["c"].as_f64().unwrap() + 8.0).abs() < 1e-9);
    assert_eq!(inv["bound_equality"], true);
    assert_eq!(inv["hitchin_ok"], false);
}

#[test]
fn volume_flag_overrides_the_input() {
    let (_, v) = report(&["invariants", "--input", &data("sphere-times-genus2.json"), "--volume", "1"]);
    assert_eq!(v["invariants"]["volume"].as_f64(), Some(1.0));
}

#[test]
fn malformed_input_exits_two() {
    let out = run(&["identity", "--input", &data("broken.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["identity", "--input", &data("missing.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["identity"]).status.code(), Some(2));
    assert_eq!(run(&["identity", "--gallery", "example4", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["identity", "--gallery", "no-such-entry"]).status.code(), Some(2));
    assert_eq!(run(&["frame", "--gallery", "example4", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["gallery"]).status.code(), Some(2));
    assert_eq!(run(&["gallery", "--list", "--all"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("invariants"));
}

#[test]
fn fuzz_reports_no_failures() {
    let (code, v) = report(&["fuzz", "--count", "50", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["fuzz"]["count"], 50);
    assert_eq!(v["fuzz"]["failures"], 0);
}

#[test]
fn gallery_meets_its_expectations() {
    let (code, v) = report(&["gallery", "--all"]);
    assert_eq!(code, 0);
    for entry in v["gallery"].as_array().unwrap() {
        assert_eq!(entry["ok"], true, "{}", entry["name"]);
    }
}

#[test]
fn json_file_matches_stdout_report() {
    let path = std::env::temp_dir().join(format!("stframe-cli-{}.json", std::process::id()));
    let path_str = path.to_string_lossy().into_owned();
    let out = run(&["frame", "--gallery", "example6", "--m", "2", "--json", &path_str]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty(), "human summary expected on stdout");
    let file = std::fs::read(&path).unwrap();
    let _ = std::fs::remove_file(&path);
    let piped = run(&["frame", "--gallery", "example6", "--m", "2", "--json", "-"]);
    assert_eq!(file, piped.stdout);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["frame", "--gallery", "example-products", "--c1", "1", "--c2", "1", "--seed", "4", "--json", "-"],
        vec!["fuzz", "--count", "100", "--seed", "8", "--json", "-"],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}

#[test]
fn unwritable_json_target_exits_two() {
    let out = run(&["identity", "--gallery", "sphere4", "--json", "/nonexistent-dir/report.json"]);
    assert_eq!(out.status.code(), Some(2));
}
