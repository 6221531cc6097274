use std::path::PathBuf;
use std::process::Command;

use eqsketch_cli::{run, EXIT_INPUT, EXIT_OK, EXIT_REJECTED};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn eqs(args: &[&str]) -> eqsketch_cli::Outcome {
    let mut all = vec!["eqsketch"];
    all.extend_from_slice(args);
    run(all)
}

#[test]
fn compile_prints_the_three_stages() {
    let out = eqs(&["compile", "--term", "t1", &corpus("compile.msl")]);
    assert_eq!(out.code, EXIT_OK, "{}", out.output);
    assert!(out.output.contains("D : (s1 × s1 × s2 × s4) -> (s1 × s1 × s1 × s2) = <p1,p2,p1,p3>"));
    assert!(out.output.contains("I : (s1 × s1 × s1 × s2) -> (s1 × (s1 × s1) × s2) = <p1,<p2,p3>,p4>"));
    assert!(out.output.contains("arr : (s1 × s1 × s2 × s4) -> s5 = f<p1,g<p2,p1>,p3>"));
}

#[test]
fn subst_matches_the_worked_example() {
    let out = eqs(&["subst", "--term", "e", "--var", "x32", "--with", "u", &corpus("substitution.msl")]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.output.contains("A = <p1,p2,p3,p4,p5,p6,p7,h<p4,p8>,p9,p10>"));
    assert!(out.output.contains("agree: true"));
    let out = eqs(&["--json", "subst", "--term", "e", "--var", "x32", "--with", "konst", &corpus("substitution.msl")]);
    let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
    assert_eq!(v["a_map"]["text"], "<p1,p2,p3,p4,p5,p6,k,p7>");
}

#[test]
fn proofs_check_and_fail_with_the_right_codes() {
    let out = eqs(&["check-proof", &corpus("monoid.msl")]);
    assert_eq!(out.code, EXIT_OK, "{}", out.output);
    assert_eq!(out.output.matches(": valid").count(), 3);

    let out = eqs(&["--json", "check-proof", "--proof", "loop", &corpus("monoid.msl")]);
    let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
    let steps = &v["proofs"][0]["certificate"]["steps"];
    assert_eq!(steps.as_array().unwrap().len(), 4);
    assert_eq!(steps[3]["rule"], "trans");

    let out = eqs(&["check-proof", &corpus("broken.msl")]);
    assert_eq!(out.code, EXIT_REJECTED);
    assert!(out.output.contains("middle terms"));
    assert!(out.output.contains("not inhabited"));
    assert!(out.output.contains("already declared"));
}

#[test]
fn normalize_proof_reports_levels() {
    let out = eqs(&["normalize-proof", "--proof", "instance", &corpus("monoid.msl")]);
    assert_eq!(out.code, EXIT_OK, "{}", out.output);
    assert!(out.output.contains("4 levels"));
    assert!(out.output.contains("verdict: valid"));
    let out = eqs(&["normalize-proof", "--proof", "badtrans", &corpus("broken.msl")]);
    assert_eq!(out.code, EXIT_REJECTED);
}

#[test]
fn oracle_finds_a_counterexample_to_commutativity() {
    let out = eqs(&["oracle", "--max-size", "2", "--equation", "comm", &corpus("monoid.msl")]);
    assert_eq!(out.code, EXIT_REJECTED);
    assert!(out.output.contains("counterexample"));
    let out = eqs(&["oracle", "--max-size", "2", "--proof", "instance", &corpus("monoid.msl")]);
    assert_eq!(out.code, EXIT_OK, "{}", out.output);
    let out = eqs(&["oracle", "--max-size", "9", "--equation", "comm", &corpus("monoid.msl")]);
    assert_eq!(out.code, EXIT_INPUT);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.msl");
    std::fs::write(&bad, "sort s1\nop f : s1 -> \n").unwrap();
    let out = eqs(&["sketch", bad.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.output.contains("2:14"));
    let out = eqs(&["compile", "--term", "nope", &corpus("compile.msl")]);
    assert_eq!(out.code, EXIT_INPUT);
    let out = eqs(&["--json", "check-proof", "missing.msl"]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(serde_json::from_str::<serde_json::Value>(&out.output).unwrap()["error"].is_string());
    assert_eq!(eqs(&["frobnicate"]).code, EXIT_INPUT);
}

#[test]
fn binary_uses_the_same_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_eqsketch");
    let ok = Command::new(bin).args(["sketch", &corpus("monoid.msl")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("cones:"));
    let bad = Command::new(bin).args(["check-proof", &corpus("broken.msl")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_REJECTED));
    let missing = Command::new(bin).args(["sketch", "/nonexistent.msl"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(EXIT_INPUT));
    assert!(!missing.stderr.is_empty());
}

#[test]
fn corpus_round_trips_through_the_printer() {
    for f in ["compile.msl", "substitution.msl", "monoid.msl", "broken.msl"] {
        let text = std::fs::read_to_string(corpus(f)).unwrap();
        let spec = eqsketch::dsl::parse_spec(&text).unwrap();
        assert_eq!(eqsketch::dsl::parse_spec(&spec.print()).unwrap(), spec, "{f}");
    }
}
