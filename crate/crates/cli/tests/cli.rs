use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohere")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const LEFT: &str = "I(iota(1_A)) ; kappa(1_A)";
const RIGHT: &str = "iota(1_(I(A))) ; lambda(1_A)";

#[test]
fn check_accepts_bundled_and_file_structures() {
    assert_eq!(code(&["check", "monoidal"]), 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loop.struct");
    std::fs::write(&path, "signature:\n  F : 1\nrules:\n  tau(x) : F(x) -> F(x)\n").unwrap();
    assert_eq!(code(&["check", path.to_str().unwrap()]), 0);
}

#[test]
fn check_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.struct");
    std::fs::write(&path, "signature:\n  F : 1\nrules:\n  tau(x) : F(x) -> G(x)\n").unwrap();
    assert_eq!(code(&["check", path.to_str().unwrap()]), 1);
    assert_eq!(code(&["check", "no-such-structure"]), 1);
}

#[test]
fn decide_exit_codes_follow_the_verdict() {
    assert_eq!(code(&["decide", "ex-nested", LEFT, LEFT]), 0);
    assert_eq!(code(&["decide", "ex-nested", LEFT, RIGHT]), 2);
}

#[test]
fn decide_json_names_the_verdict() {
    let v = json(&["decide", "ex-nested", LEFT, RIGHT]);
    assert!(v.to_string().contains("NotEqual"), "{v}");
}

#[test]
fn quasicycle_found_on_the_loop() {
    assert_eq!(code(&["quasicycle", "undecidable-loop", "F(A)"]), 2);
    assert_eq!(code(&["quasicycle", "imc2", "((A ot2 B) ot1 (C ot2 D))"]), 0);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graph.json");
    let status = run(&["--format", "json", "--out", path.to_str().unwrap(), "graph", "ex-nested", "I(I(A))"]).status;
    assert!(status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.is_object());
}

#[test]
fn imc_suite_passes_for_two_tensors() {
    let v = json(&["imc", "2", "--vars", "3"]);
    assert_eq!(v["ok"], Value::Bool(true), "{v}");
    assert_eq!(v["map_discrepancies"].as_array().map(Vec::len), Some(0));
}

#[test]
fn hom_reports_one_class_in_the_monoidal_structure() {
    let v = json(&["hom", "monoidal", "(A ot1 (B ot1 (C ot1 D)))", "(((A ot1 B) ot1 C) ot1 D)"]);
    assert!(v.is_object(), "{v}");
    assert_eq!(code(&["hom", "monoidal", "(A ot1 (B ot1 (C ot1 D)))", "(((A ot1 B) ot1 C) ot1 D)"]), 0);
}

fn schema(name: &str) -> Value {
    let path = format!("{}/schemas/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn json_outputs_match_their_schemas() {
    let nested = ["ex-nested", "I(I(A))"];
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("check", vec!["check", "imc2"]),
        ("decide", vec!["decide", "ex-nested", LEFT, RIGHT]),
        ("maclane", vec!["maclane", "ex-disjoint", "--leaves", "1", "--max-size", "4"]),
        ("diamonds", vec!["diamonds", nested[0], nested[1]]),
        ("quasicycle", vec!["quasicycle", "undecidable-loop", "F(A)"]),
        ("hom", vec!["hom", nested[0], nested[1], "H(A)"]),
        ("graph", vec!["graph", nested[0], nested[1]]),
        ("imc", vec!["imc", "2", "--vars", "2"]),
    ];
    for (name, args) in cases {
        let v = json(&args);
        let validator = jsonschema::validator_for(&schema(name)).unwrap();
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}\n{v}");
    }
}

/// Balanced braces and brackets outside quoted strings, one `digraph` header.
fn looks_like_dot(text: &str) -> bool {
    let (mut depth, mut quoted, mut escaped) = (0i64, false, false);
    for c in text.chars() {
        if quoted {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => quoted = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => quoted = true,
            '{' | '[' => depth += 1,
            '}' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0 && !quoted && text.trim_start().starts_with("digraph") && text.trim_end().ends_with('}')
}

#[test]
fn dot_outputs_are_well_formed() {
    for args in [
        vec!["--format", "dot", "graph", "ex-nested", "I(I(A))"],
        vec!["--format", "dot", "decide", "ex-nested", LEFT, LEFT],
    ] {
        let out = run(&args);
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(looks_like_dot(&text), "{text}");
    }
}

#[test]
fn maclane_scan_of_two_tensors_commutes() {
    let out = run(&["maclane", "imc2", "--leaves", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all diamonds commute"));
}

#[test]
fn diamond_counts_grow_with_depth() {
    let count = |depth: &str| {
        json(&["--max-depth", depth, "diamonds", "prop-nfca", "I(A)", "--region"])["count"].as_u64().unwrap()
    };
    let counts: Vec<u64> = ["3", "4", "5"].iter().map(|d| count(d)).collect();
    assert!(counts.windows(2).all(|w| w[0] < w[1]), "{counts:?}");
}
