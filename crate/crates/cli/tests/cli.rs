use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use pckfo::parser::{model_to_json, parse_model};
use pckfo::{parse_formula, Evaluator, Valuation};

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel).display().to_string()
}

fn pckfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pckfo")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn eval_values_and_exit_codes() {
    let out = pckfo(&["eval", "--model", &fixture("models/minimal.json"), "--formula", "P[a]>=0 p"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("all-states: true"));

    let out = pckfo(&["eval", "--model", &fixture("models/chain-3.json"), "--formula", "C{G} p", "--state", "s0", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["verdict"], "unsat-at-state");
    assert_eq!(doc["details"]["value"], false);

    let out = pckfo(&["eval", "--model", &fixture("models/chain-3.json"), "--formula", "p", "--state", "nowhere"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pckfo(&["eval", "--model", &fixture("models/chain-3.json"), "--formula", "p &"]);
    assert_eq!(out.status.code(), Some(3));
    let out = pckfo(&["eval", "--model", &fixture("models/unnormalized.json"), "--formula", "p"]);
    assert_eq!(out.status.code(), Some(4));
    let out = pckfo(&["eval", "--model", &fixture("models/minimal.json"), "--formula", "R(x)"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pckfo(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_reports_unmeasurable_operands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coarse.json");
    // one atom {s0, s1} while p holds only at s0
    let doc = serde_json::json!({
        "states": ["s0", "s1"],
        "domain": ["d0"],
        "agents": ["a"],
        "access": {"a": [["s0", "s0"], ["s0", "s1"], ["s1", "s0"], ["s1", "s1"]]},
        "relations": {"p": {"arity": 0, "states": {"s0": [[]]}}},
        "prob": {"a": {
            "s0": {"sample": ["s0", "s1"], "atoms": [["s0", "s1"]], "weights": {"0": "1"}},
            "s1": {"sample": ["s0", "s1"], "atoms": [["s0", "s1"]], "weights": {"0": "1"}}
        }}
    });
    fs::write(&path, doc.to_string()).unwrap();
    let model = path.display().to_string();
    let valid = pckfo(&["validate", "--model", &model]);
    if valid.status.code() != Some(0) {
        panic!("fixture did not validate: {}", String::from_utf8_lossy(&valid.stderr));
    }
    let out = pckfo(&["eval", "--model", &model, "--formula", "P[a]>=1/2 p"]);
    assert_eq!(out.status.code(), Some(5), "{}", String::from_utf8_lossy(&out.stderr));
    let out = pckfo(&["eval", "--model", &model, "--formula", "P[a]>=1 (p | !p)"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn proof_verdicts() {
    let out = pckfo(&["check-proof", &fixture("proofs/k-distribution.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verdict: accepted\n"));

    let out = pckfo(&["check-proof", &fixture("proofs/fixed-point.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["verdict"], "accepted-with-bounded-certificates");
    assert_eq!(doc["details"]["bound"], 4);

    let out = pckfo(&["check-proof", &fixture("proofs/probabilistic-necessitation.json"), "--mode", "con", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["details"]["step"], 1);

    let out = pckfo(&["check-proof", &fixture("models/minimal.json")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_and_classify() {
    let out = pckfo(&["validate", "--model", &fixture("models/unnormalized.json")]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weights sum to 3/4"));

    let classes = |name: &str| {
        let out = pckfo(&["classify", "--model", &fixture(name), "--json"]);
        assert_eq!(out.status.code(), Some(0));
        json(&out)["details"]["classes"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect::<Vec<_>>()
    };
    assert!(classes("models/con-demo.json").contains(&"CON".to_string()));
    assert!(classes("models/objective.json").contains(&"OBJ".to_string()));
}

#[test]
fn find_writes_a_witness_that_replays() {
    let dir = tempfile::tempdir().unwrap();
    let text = "P[i]>=1/2 p & P[i]>=1/2 !p";
    let out = pckfo(&["find", "--formula", text, "--json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let written = fs::read_to_string(dir.path().join("witness.json")).unwrap();
    let model = parse_model(&written).unwrap();
    assert_eq!(model_to_json(&model), written);
    let state = model.state_index(doc["details"]["state"].as_str().unwrap()).unwrap();
    assert!(Evaluator::new(&model).satisfies(state, &Valuation::new(), &parse_formula(text).unwrap()).unwrap());

    let state = doc["details"]["state"].as_str().unwrap();
    let path = dir.path().join("witness.json");
    let out = pckfo(&["eval", "--model", path.to_str().unwrap(), "--formula", text, "--state", state]);
    assert_eq!(out.status.code(), Some(0));

    let out = pckfo(&["find", "--formula", "P[a]>=1/2 p & P[a]>=2/3 !p", "--budget-agents", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("verdict: not-found-within-budget"));
    let out = pckfo(&["find", "--formula", "p", "--budget-states", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fuzz_is_seed_stable() {
    let full = pckfo(&["fuzz", "--n", "1000", "--seed", "7"]);
    assert_eq!(full.status.code(), Some(0), "{}", stdout(&full));

    let args = ["fuzz", "--n", "30", "--models", "20", "--seed", "7", "--json"];
    let a = pckfo(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, pckfo(&args).stdout);
    let b = pckfo(&["fuzz", "--n", "30", "--models", "20", "--seed", "8", "--json"]);
    assert_ne!(a.stdout, b.stdout);

    let out = pckfo(&["fuzz", "--class", "con", "--n", "50", "--models", "20"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn demo_writes_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let out = pckfo(&["demo", "noncompactness", "--m", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for k in 1..=3 {
        let path = dir.path().join(format!("chain-m{k}.json"));
        let formula = format!("{}p & !C{{G}} p", "E{G} ".repeat(k));
        let out = pckfo(&["eval", "--model", path.to_str().unwrap(), "--formula", &formula, "--state", "s0"]);
        assert_eq!(out.status.code(), Some(0), "{formula}");
    }
    let out = pckfo(&["demo", "noncompactness", "--m", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suites_and_fixpoint() {
    let out = pckfo(&["suite", "--family", "expected-invalid", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "valid-in-suite");
    let out = pckfo(&["fixpoint", "--budget-states", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("mismatches: 0"));
    let out = pckfo(&["suite", "--family", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}
