use std::fs;
use std::path::PathBuf;

use pckfo::eval::extension;
use pckfo::oracle::{random_model, random_proof, FuzzSignature};
use pckfo::parser::parse_proof;
use pckfo::proof::{
    check, deduction_transform, strong_necessitation_transform, Proof, ProofMode, ProofVerdict, StepError,
    TransformError,
};
use pckfo::syntax::free_vars;
use pckfo::{print_formula, AgentId, EvalError, Formula, Valuation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shipped(name: &str) -> Proof {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/proofs").join(name);
    parse_proof(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shipped_proofs() {
    let k = shipped("k-distribution.json");
    assert_eq!(check(&k), ProofVerdict::Accepted);
    assert_eq!(print_formula(k.conclusion().unwrap()), "!(K[a] !(p & !q) & !!(K[a] p & !K[a] q))");

    let e = shipped("everyone-equivalence.json");
    assert_eq!(check(&e), ProofVerdict::Accepted);
    let iff = pckfo::parse_formula("E{a,b} p <-> K[a] p & K[b] p").unwrap();
    assert_eq!(e.conclusion(), Some(&iff));

    let fp = shipped("fixed-point.json");
    assert_eq!(check(&fp), ProofVerdict::AcceptedWithBoundedCertificates { bound: 4 });
    let axiom = pckfo::parse_formula("C{a,b} q -> E{a,b} (q & C{a,b} q)").unwrap();
    assert_eq!(fp.conclusion(), Some(&axiom));
}

#[test]
fn probabilistic_necessitation_is_plain_only() {
    let mut proof = shipped("probabilistic-necessitation.json");
    assert_eq!(check(&proof), ProofVerdict::Accepted);
    proof.mode = ProofMode::Con;
    assert_eq!(check(&proof), ProofVerdict::Rejected { step: 1, reason: StepError::RpDisabled });
}

#[test]
fn tampered_proofs_are_rejected() {
    let mut k = shipped("k-distribution.json");
    k.steps[2].formula = Formula::prop("q");
    assert!(matches!(check(&k), ProofVerdict::Rejected { step: 2, reason: StepError::MpMismatch }));

    let mut fp = shipped("fixed-point.json");
    let last_rc = fp.steps.iter().rposition(|s| s.just.certificate().is_some()).unwrap();
    if let pckfo::proof::Justification::Rc { cert, .. } = &mut fp.steps[last_rc].just {
        cert.premises.remove(&2);
    }
    assert!(matches!(
        check(&fp),
        ProofVerdict::Rejected { reason: StepError::CertificateRange { .. }, .. }
    ));
}

#[test]
fn deduction_on_a_shipped_shape() {
    // from {p, p -> q} derive q, then discharge p
    let text = r#"{
      "hypotheses": ["p", "p -> q"],
      "steps": [
        {"formula": "p", "just": {"kind": "hyp", "index": 0}},
        {"formula": "p -> q", "just": {"kind": "hyp", "index": 1}},
        {"formula": "q", "just": {"kind": "MP", "minor": 0, "major": 1}}
      ]
    }"#;
    let proof = parse_proof(text).unwrap();
    let d = deduction_transform(&proof, 0).unwrap();
    assert_eq!(check(&d), ProofVerdict::Accepted);
    assert_eq!(print_formula(d.conclusion().unwrap()), "!(p & !q)");
    assert_eq!(d.hypotheses, vec![pckfo::parse_formula("p -> q").unwrap()]);
    assert!(matches!(deduction_transform(&proof, 5), Err(TransformError::NoSuchHypothesis(5))));
}

/// True at every state under every valuation, or not measurable somewhere.
fn valid_or_unmeasurable(m: &pckfo::Model, f: &Formula) -> bool {
    let vars: Vec<String> = free_vars(f).into_iter().collect();
    let mut vals = vec![Valuation::new()];
    for x in &vars {
        vals = vals
            .into_iter()
            .flat_map(|v| {
                (0..m.domain().len()).map(move |d| {
                    let mut w = v.clone();
                    w.insert(x.clone(), d);
                    w
                })
            })
            .collect();
    }
    vals.iter().all(|v| match extension(m, v, f) {
        Ok(ext) => ext.count_ones(..) == m.n_states(),
        Err(EvalError::NotMeasurable { .. }) => true,
        Err(e) => panic!("{e}"),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theorem_steps_are_valid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = FuzzSignature::default();
        let proof = random_proof(&mut rng, &sig, 8);
        prop_assert!(check(&proof).is_accepted());
        let models: Vec<_> = (0..4).map(|_| random_model(&mut rng, &sig)).collect();
        for (step, flag) in proof.steps.iter().zip(proof.theorem_flags()) {
            if flag {
                for m in &models {
                    prop_assert!(valid_or_unmeasurable(m, &step.formula), "{}", print_formula(&step.formula));
                }
            }
        }
    }

    #[test]
    fn transforms_preserve_acceptance(seed in any::<u64>()) {
        let proof = random_proof(&mut ChaCha8Rng::seed_from_u64(seed), &FuzzSignature::default(), 10);
        let phi = proof.hypotheses[0].clone();
        let psi = proof.conclusion().unwrap().clone();

        let d = deduction_transform(&proof, 0).unwrap();
        prop_assert!(check(&d).is_accepted(), "{:?}", check(&d));
        let rest: Vec<Formula> = proof.hypotheses.iter().filter(|h| **h != phi).cloned().collect();
        prop_assert_eq!(d.conclusion(), Some(&Formula::implies(phi, psi.clone())));
        prop_assert_eq!(d.hypotheses, rest);

        let a = AgentId::new("a");
        let k = strong_necessitation_transform(&proof, &a).unwrap();
        prop_assert!(check(&k).is_accepted(), "{:?}", check(&k));
        prop_assert_eq!(k.conclusion(), Some(&Formula::know(a.clone(), psi)));
        let lifted: Vec<Formula> = proof.hypotheses.iter().map(|h| Formula::know(a.clone(), h.clone())).collect();
        prop_assert_eq!(k.hypotheses, lifted);
    }
}
