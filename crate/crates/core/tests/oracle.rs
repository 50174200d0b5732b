use pckfo::oracle::{
    class_sanity, count_models, find_model, fuzz_class, fuzz_soundness, noncompactness_demo, suite_instances,
    validity_suite, Family, FindOutcome, ModelClass, OracleError, SearchBudget,
};
use pckfo::parser::{model_to_json, parse_model};
use pckfo::report::Verdict;
use pckfo::{parse_formula, Evaluator, Valuation};

#[test]
fn find_returns_a_revalidating_witness() {
    let f = parse_formula("P[i]>=1/2 p & P[i]>=1/2 !p").unwrap();
    let outcome = find_model(&f, &SearchBudget::default()).unwrap();
    let FindOutcome::Found { model, state, .. } = &outcome else { panic!("{outcome:?}") };
    let report = outcome.report(&f);
    assert_eq!(report.verdict, Verdict::Sat);
    let witness = parse_model(&report.artifacts[0].content).unwrap();
    assert_eq!(model_to_json(&witness), model_to_json(model));
    assert!(Evaluator::new(&witness).satisfies(*state, &Valuation::new(), &f).unwrap());
    // smallest witness: two states, i uniform over both
    assert_eq!(witness.n_states(), 2);
}

#[test]
fn contradictions_are_not_found() {
    let b = SearchBudget { max_agents: 1, ..SearchBudget::default() };
    let never = parse_formula("P[a]>=1/2 p & P[a]>=2/3 !p").unwrap();
    match find_model(&never, &b).unwrap() {
        FindOutcome::NotFoundWithinBudget { examined, .. } => assert_eq!(examined, 68),
        other => panic!("{other:?}"),
    }
    let report = find_model(&never, &b).unwrap().report(&never);
    assert_eq!(report.verdict, Verdict::NotFoundWithinBudget);
    // knowledge is not factive without reflexive access
    let f = parse_formula("K[a] p & !p").unwrap();
    assert!(matches!(find_model(&f, &b).unwrap(), FindOutcome::Found { .. }));
}

#[test]
fn model_counts() {
    // per shape: 2^n choices of p, then 2^n accessibility sets per agent and state
    let b = SearchBudget { max_agents: 1, ..SearchBudget::default() };
    assert_eq!(count_models(&b).unwrap(), 2 * 2 + 4 * 4 * 4);
    let big = SearchBudget { max_states: 4, ..SearchBudget::default() };
    assert!(matches!(count_models(&big), Err(OracleError::TooLarge { .. })));
}

#[test]
fn seeded_fuzz_is_deterministic() {
    let b = SearchBudget { max_states: 3, max_domain: 2, seed: 7, ..SearchBudget::default() };
    let first = fuzz_soundness(&b, 20, 20);
    assert!(first.passed());
    assert_eq!(first.report().to_json(), fuzz_soundness(&b, 20, 20).report().to_json());
    let other = SearchBudget { seed: 8, ..b };
    assert_ne!(fuzz_soundness(&other, 20, 20).report().to_json(), first.report().to_json());
}

#[test]
fn class_axioms_hold_on_their_classes() {
    let b = SearchBudget { max_states: 3, max_domain: 2, seed: 1, ..SearchBudget::default() };
    for class in ModelClass::ALL {
        let s = fuzz_class(class, &b, 30, 10);
        assert!(s.passed(), "{}: {:?}", class.name(), s.failures);
    }
}

#[test]
fn con_sanity_counterexample_replays() {
    let b = SearchBudget { max_states: 3, max_domain: 2, ..SearchBudget::default() };
    let failure = class_sanity(ModelClass::Con, &b, 500).expect("a non-CON counterexample");
    let model = parse_model(&failure.model_json).unwrap();
    assert!(!model.classify().con);
    let f = parse_formula(&failure.formula).unwrap();
    let state = model.state_index(&failure.state).unwrap();
    let v: Valuation = failure.valuation.iter().map(|(x, d)| (x.clone(), model.domain_index(d).unwrap())).collect();
    assert!(!Evaluator::new(&model).satisfies(state, &v, &f).unwrap());
}

#[test]
fn demo_witnesses_replay() {
    let report = noncompactness_demo(3).unwrap();
    assert_eq!(report.verdict, Verdict::Sat);
    let names: Vec<&str> = report.artifacts.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["chain-m1.json", "chain-m2.json", "chain-m3.json", "threshold-n1.json", "threshold-n2.json", "threshold-n3.json"]);
    let chain = parse_model(&report.artifacts[2].content).unwrap();
    let mut ev = Evaluator::new(&chain);
    for f in ["E{G} p", "E{G} E{G} p", "E{G} E{G} E{G} p", "!C{G} p"] {
        assert!(ev.satisfies(0, &Valuation::new(), &parse_formula(f).unwrap()).unwrap(), "{f}");
    }
    let threshold = parse_model(&report.artifacts[5].content).unwrap();
    let mut ev = Evaluator::new(&threshold);
    for f in ["P[i]>=0 p", "P[i]>=1/2 p", "P[i]>=2/3 p", "!P[i]=1 p"] {
        assert!(ev.satisfies(0, &Valuation::new(), &parse_formula(f).unwrap()).unwrap(), "{f}");
    }
    assert!(noncompactness_demo(5).is_err());
}

#[test]
fn expected_invalid_counterexample_replays() {
    let report = validity_suite(Family::ExpectedInvalid, &SearchBudget::default()).unwrap();
    assert_eq!(report.verdict, Verdict::ValidInSuite);
    let instances = suite_instances(Family::ExpectedInvalid);
    for (ix, inst) in instances.iter().enumerate() {
        let art = report.artifacts.iter().find(|a| a.name == format!("expected-invalid-{ix}.json")).unwrap();
        let model = parse_model(&art.content).unwrap();
        assert!(!Evaluator::new(&model).valid(&inst.formula).unwrap());
    }
}
