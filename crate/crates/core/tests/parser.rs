use std::fs;
use std::path::PathBuf;

use pckfo::oracle::{random_formula, random_model, random_proof, FuzzSignature};
use pckfo::parser::{
    model_to_doc, model_to_json, parse_model, parse_proof, proof_to_json, DocError, ModelDoc,
};
use pckfo::{parse_formula, print_formula};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn read(rel: &str) -> String {
    fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

#[test]
fn golden_corpus_prints_back_exactly() {
    let text = read("corpus/formulas.txt");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 100);
    let distinct: std::collections::BTreeSet<_> = lines.iter().collect();
    assert_eq!(distinct.len(), 100);
    for line in lines {
        let f = parse_formula(line).unwrap_or_else(|e| panic!("{line}: {e}"));
        assert_eq!(print_formula(&f), line);
    }
}

#[test]
fn sugar_expands_to_recorded_forms() {
    for line in read("corpus/sugar.tsv").lines() {
        let (input, expected) = line.split_once('\t').expect("two columns");
        assert_eq!(print_formula(&parse_formula(input).unwrap()), expected, "{input}");
    }
}

#[test]
fn model_fixtures_are_canonical() {
    for name in ["minimal", "con-demo", "objective", "chain-3"] {
        let text = read(&format!("models/{name}.json"));
        let model = parse_model(&text).unwrap();
        assert_eq!(model_to_json(&model), text, "{name}");
    }
}

#[test]
fn proof_fixtures_are_canonical() {
    for name in ["k-distribution", "everyone-equivalence", "fixed-point", "probabilistic-necessitation"] {
        let text = read(&format!("proofs/{name}.json"));
        let proof = parse_proof(&text).unwrap();
        assert_eq!(proof_to_json(&proof), text, "{name}");
    }
}

#[test]
fn unnormalized_weights_fail_validation() {
    match parse_model(&read("models/unnormalized.json")) {
        Err(DocError::Invalid(v)) => {
            assert!(v.iter().any(|v| v.to_string().contains("weights sum to 3/4")), "{v:?}");
        }
        other => panic!("expected a validation failure, got {other:?}"),
    }
}

#[test]
fn parse_errors() {
    let cases = [("p &", 3), ("K[a p", 4), ("P[a]>=3/2 p", 6), ("R(c) & R(c, c)", 7), ("(p", 2)];
    for (text, start) in cases {
        let e = parse_formula(text).unwrap_err();
        assert_eq!(e.span().start, start, "{text}: {e}");
    }
}

#[test]
fn malformed_proof_documents() {
    let unknown = r#"{"steps": [{"formula": "p", "just": {"kind": "MAGIC"}}]}"#;
    assert!(parse_proof(unknown).unwrap_err().to_string().contains("unknown rule name `MAGIC`"));
    let forward = r#"{"steps": [{"formula": "q", "just": {"kind": "MP", "minor": 0, "major": 1}}]}"#;
    assert!(parse_proof(forward).unwrap_err().to_string().contains("does not precede"));
    let dangling = r#"{"steps": [{"formula": "q", "just": {"kind": "hyp", "index": 0}}]}"#;
    assert!(parse_proof(dangling).unwrap_err().to_string().contains("dangling hypothesis"));
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), depth in 0usize..5) {
        let sig = FuzzSignature::default();
        let f = random_formula(&mut ChaCha8Rng::seed_from_u64(seed), &sig, depth, &[]);
        let text = print_formula(&f);
        let back = parse_formula(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(print_formula(&back), text);
    }

    #[test]
    fn error_spans_lie_inside_the_input(text in "[pqRKPECs!&|()<>=\\-\\[\\]{},/0-9a-z ]{0,24}") {
        if let Err(e) = parse_formula(&text) {
            let span = e.span();
            prop_assert!(span.start <= span.end && span.end <= text.len(), "{} for {:?}", e, text);
        }
    }

    #[test]
    fn model_documents_ignore_declaration_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_model(&mut rng, &FuzzSignature::default());
        let canonical = model_to_json(&model);
        let mut doc: ModelDoc = model_to_doc(&model);
        doc.states.shuffle(&mut rng);
        doc.domain.shuffle(&mut rng);
        doc.agents.shuffle(&mut rng);
        for pairs in doc.access.values_mut() {
            pairs.shuffle(&mut rng);
        }
        let shuffled = serde_json::to_string(&doc).unwrap();
        prop_assert_eq!(model_to_json(&parse_model(&shuffled).unwrap()), canonical);
    }

    #[test]
    fn proof_documents_round_trip(seed in any::<u64>()) {
        let proof = random_proof(&mut ChaCha8Rng::seed_from_u64(seed), &FuzzSignature::default(), 6);
        let text = proof_to_json(&proof);
        let back = parse_proof(&text).unwrap();
        prop_assert_eq!(&back, &proof);
        prop_assert_eq!(proof_to_json(&back), text);
    }
}
