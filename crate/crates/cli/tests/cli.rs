use std::path::PathBuf;
use std::process::{Command, Output};

use qtop_core::suite::{CheckResult, Status};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn qtop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtop"))
        .args(args)
        .env_remove("QTOP_DEPTH_DEFAULT")
        .output()
        .expect("qtop runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sierpinski_report() {
    let o = qtop(&["--format", "json", "space", "check", &fixture("sierpinski.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["t0"], true);
    assert_eq!(v["sober"], true);
    assert_eq!(v["scattered"], true);
    assert_eq!(v["cb_rank"], 2);
}

#[test]
fn chain_game_on_omega_plus_one() {
    let o = qtop(&["game", "play", &fixture("omega1_scott.json"), "--p1", "chain", "--p2", "qm-d1", "--rounds", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("won by refinement at omega"), "{}", stdout(&o));
    let j = qtop(&["--format", "json", "game", "play", &fixture("omega1_scott.json"), "--p1", "chain", "--p2", "qm-d1"]);
    let text = stdout(&j);
    assert!(text.contains("WonByRefinement"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"]["u_certificate_agrees"], true);
}

#[test]
fn broken_metric_names_triangle() {
    let o = qtop(&["--format", "json", "qm", "check", &fixture("bad/broken.json")]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["violations"][0].get("Triangle").is_some(), "{v}");
}

#[test]
fn corrupted_space_is_a_parse_error() {
    let o = qtop(&["space", "check", &fixture("bad/corrupted_space.json")]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("union"), "{err}");
}

#[test]
fn usage_and_missing_files() {
    assert_eq!(qtop(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(qtop(&["space", "check", "/nonexistent/space.json"]).status.code(), Some(3));
    assert_eq!(qtop(&["--help"]).status.code(), Some(0));
    assert_eq!(qtop(&["verify", "--fixtures", &fixture("bad")]).status.code(), Some(3));
}

#[test]
fn verify_passes() {
    let o = qtop(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn short_horizon_is_undecided_not_failed() {
    let o = qtop(&["--format", "json", "verify", "--horizon", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let results: Vec<CheckResult> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(results.iter().any(|r| r.name == "game-characterization" && r.status == Status::UndecidedAtDepth));
    assert!(results.iter().all(|r| r.status != Status::Fail));
}

#[test]
fn verify_json_is_deterministic_and_round_trips() {
    let a = qtop(&["--format", "json", "verify", "--seed", "7"]);
    let b = qtop(&["--format", "json", "verify", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let results: Vec<CheckResult> = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(results.len(), 11);
    let again: Vec<CheckResult> = serde_json::from_str(&serde_json::to_string_pretty(&results).unwrap()).unwrap();
    assert_eq!(again, results);
}

#[test]
fn explicit_fixture_directory() {
    let o = qtop(&["verify", "--fixtures", &fixture(""), "--horizon", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn borel_and_domain_commands() {
    let o = qtop(&["borel", "classify", &fixture("powerset2.json"), "(diff (basic 2) (basic 1))"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Σ2"), "{}", stdout(&o));
    assert_eq!(qtop(&["domain", "poset", &fixture("diamond.json")]).status.code(), Some(0));
    assert_eq!(qtop(&["domain", "embed", &fixture("presentation.json"), "--depth", "3"]).status.code(), Some(0));
    assert_eq!(qtop(&["repr", "translate", &fixture("delta.json"), "--depth", "3"]).status.code(), Some(0));
    assert_eq!(qtop(&["repr", "fcheck", &fixture("fcheck.json")]).status.code(), Some(0));
    assert_eq!(qtop(&["qm", "derive", "pi2", &fixture("d1_omega.json"), &fixture("pairs.json")]).status.code(), Some(0));
    assert_eq!(qtop(&["game", "tournament", &fixture("tournament.json")]).status.code(), Some(0));
}
