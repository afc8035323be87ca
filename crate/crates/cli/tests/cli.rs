use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_profnet"))
        .args(args)
        .env_remove("PROFNET_BOUNDS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn correct_figure_exits_zero() {
    let out = run(&["check", &fixture("fig1.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("MLL+Mix: correct"), "{text}");
    assert!(text.contains("semantic: correct"), "{text}");
}

#[test]
fn incorrect_figure_exits_one_with_counterexample() {
    let out = run(&["--format", "json", "check", &fixture("fig2.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    assert_eq!(report["dr_mix"], Value::Bool(false));
    assert_eq!(report["agree"], Value::Bool(true));
    let refutation = &report["refutation"];
    assert!(refutation.is_object(), "{report}");
    assert!(refutation["claims"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn invalid_inputs_exit_two() {
    for name in ["malformed.json", "truncated.json", "does_not_exist.json"] {
        let out = run(&["check", &fixture(name)]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!out.stderr.is_empty(), "{name}");
    }
    assert_eq!(run(&["check"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn custom_probe_file_is_used() {
    let out = run(&["--format", "json", "check", &fixture("fig1.json"), "--probes", &fixture("probes_z2.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["probes_run"], 1);
}

#[test]
fn creed_kit_check_on_an_explicit_assignment() {
    let out = run(&["check-ck", &fixture("fig1.json"), "--assignment", &fixture("creeds_z2xz3.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fuzz_is_deterministic_per_seed() {
    let args = ["--format", "json", "--bounds", &fixture("small_bounds.json"), "fuzz", "--seed", "7"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let report = json_of(&first);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["structures"], 20);
    assert_eq!(report["discrepancies"], 0);
    assert!(report["max_links"].as_u64().is_some_and(|m| m <= 12));

    let other = run(&["--format", "json", "--bounds", &fixture("small_bounds.json"), "fuzz", "--seed", "8"]);
    assert_ne!(other.stdout, first.stdout);
}

#[test]
fn size_flag_overrides_bounds_file() {
    let out = run(&["--format", "json", "--bounds", &fixture("small_bounds.json"), "fuzz", "--seed", "2", "--size", "5"]);
    assert_eq!(json_of(&out)["structures"], 5);
}

#[test]
fn extract_recovers_the_figure_linking() {
    let out = run(&["--format", "json", "extract", "--from-structure", &fixture("fig1.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["links"], serde_json::json!([[1, 6], [2, 5], [3, 4]]));
}

#[test]
fn extract_rejects_a_non_total_family() {
    let out = run(&["extract", &fixture("not_total.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not stably total"));
}

#[test]
fn interpret_single_axiom_is_one_anti_diagonal_orbit() {
    let out = run(&["--format", "json", "interpret", &fixture("axiom.json"), "--assignment", &fixture("z2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    assert_eq!(report["num_orbits"], 1);
    let stab = report["orbits"][0]["blocks"][0]["stabilizer"].as_array().expect("stabilizer list").clone();
    assert_eq!(stab.len(), 2);
    for pair in &stab {
        let pair = pair.as_array().expect("pair");
        assert_eq!(pair.len(), 2);
    }

    let s3 = run(&["--format", "json", "interpret", &fixture("axiom.json"), "--assignment", &fixture("s3.json")]);
    let report = json_of(&s3);
    assert_eq!(report["num_orbits"], 1);
    let stab = report["orbits"][0]["blocks"][0]["stabilizer"].as_array().expect("stabilizer list").clone();
    assert_eq!(stab.len(), 6);
    let rotation = stab.iter().find(|p| p[0] == "(123)").expect("rotation present");
    assert_eq!(rotation[1], "(132)");
}

#[test]
fn oversized_assignment_respects_group_bound() {
    let out = run(&["--bound-group-order", "2", "interpret", &fixture("axiom.json"), "--assignment", &fixture("s3.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_isomorphism_at_every_probe() {
    let out = run(&["verify", "--from-structure", &fixture("fig1.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("isomorphic at all probes"));
}
