use std::fs;
use std::path::PathBuf;

use pckfo::eval::extension;
use pckfo::model::state_set;
use pckfo::oracle::{chain_model, random_formula, random_model, FuzzSignature};
use pckfo::parser::parse_model;
use pckfo::{parse_formula, EvalError, Evaluator, Model, Valuation};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(name: &str) -> Model {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/models").join(name);
    parse_model(&fs::read_to_string(path).unwrap()).unwrap()
}

fn truth(m: &Model, f: &str) -> Vec<bool> {
    let ext = extension(m, &Valuation::new(), &parse_formula(f).unwrap()).unwrap();
    (0..m.n_states()).map(|s| ext.contains(s)).collect()
}

#[test]
fn p_at_least_zero_holds_everywhere() {
    for name in ["minimal.json", "con-demo.json", "objective.json", "chain-3.json"] {
        let m = model(name);
        assert!(truth(&m, "P[a]>=0 p").iter().all(|t| *t), "{name}");
    }
}

#[test]
fn chain_demo_values() {
    let m = model("chain-3.json");
    assert_eq!(truth(&m, "C{G} p"), [false, false, false]);
    assert_eq!(truth(&m, "E{G} p"), [true, false, false]);
    assert_eq!(truth(&m, "p"), [true, true, false]);
    assert_eq!(truth(&m, "E{G} E{G} p"), [false, false, false]);
    assert_eq!(m.states(), chain_model(1).states());
}

#[test]
fn objective_fixture_values() {
    let m = model("objective.json");
    // shared weights 1/3 on s0 (p) and 2/3 on s1
    assert_eq!(truth(&m, "P[a]>=1/3 p & P[b]>=1/3 p"), [true, true]);
    assert_eq!(truth(&m, "P[a]>1/3 p"), [false, false]);
    assert_eq!(truth(&m, "P[a]=2/3 !p"), [true, true]);
    assert_eq!(truth(&m, "K[b] p"), [true, false]);
    assert_eq!(truth(&m, "K[a] p"), [false, false]);
}

#[test]
fn con_demo_values() {
    let m = model("con-demo.json");
    assert_eq!(truth(&m, "K[a] p"), [true, true, false]);
    assert_eq!(truth(&m, "Kr[b,2/3] p"), [true, true, true]);
    assert_eq!(truth(&m, "Kr[b,1] p"), [false, false, false]);
    // a's cell {s0,s1} lies inside p; b spreads 1/3 over each state
    assert_eq!(truth(&m, "Es{G,2/3} p"), [true, true, false]);
    assert_eq!(truth(&m, "Es{G,1/3} K[a] p"), [true, true, false]);
    assert_eq!(truth(&m, "Cs{G,2/3} p"), [true, true, false]);
    assert_eq!(truth(&m, "Cs{G,1} p"), [false, false, false]);
    assert_eq!(truth(&m, "C{G} p"), [false, false, false]);
}

#[test]
fn unknown_symbols_are_errors() {
    let m = model("minimal.json");
    let mut ev = Evaluator::new(&m);
    let e = ev.extension(&Valuation::new(), &parse_formula("K[zed] p").unwrap()).unwrap_err();
    assert!(matches!(e, EvalError::UnknownAgent(_)), "{e:?}");
    let e = ev.extension(&Valuation::new(), &parse_formula("nope").unwrap()).unwrap_err();
    assert!(matches!(e, EvalError::UnknownRelation(_)), "{e:?}");
}

proptest! {
    #[test]
    fn measure_complement(seed in any::<u64>(), bits in any::<u8>()) {
        let m = random_model(&mut ChaCha8Rng::seed_from_u64(seed), &FuzzSignature::default());
        let n = m.n_states();
        let a = state_set(n, (0..n).filter(|s| bits & (1 << s) != 0));
        let mut rest = a.clone();
        rest.toggle_range(..);
        for i in 0..m.agents().len() {
            for s in 0..n {
                match (m.measure(i, s, &a), m.measure(i, s, &rest)) {
                    (Ok(x), Ok(y)) => prop_assert!(x.checked_add(&y).is_some_and(|t| t.is_one())),
                    (Err(_), Err(_)) => {}
                    (x, y) => prop_assert!(false, "measurability differs: {:?} {:?}", x, y),
                }
            }
        }
    }

    #[test]
    fn renaming_states_commutes_with_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = FuzzSignature::default();
        let m = random_model(&mut rng, &sig);
        let f = random_formula(&mut rng, &sig, 3, &[]);
        let mut perm: Vec<usize> = (0..m.n_states()).collect();
        perm.shuffle(&mut rng);
        let renamed = m.permute_states(&perm);
        match (extension(&m, &Valuation::new(), &f), extension(&renamed, &Valuation::new(), &f)) {
            (Ok(x), Ok(y)) => {
                for s in 0..m.n_states() {
                    prop_assert_eq!(x.contains(s), y.contains(perm[s]));
                }
            }
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "outcomes differ: {:?} {:?}", x, y),
        }
    }

    #[test]
    fn probability_sugar_duality(seed in any::<u64>()) {
        // P<=r φ and P>=1-r ¬φ are the same formula; P>r φ is ¬P<=r φ
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = FuzzSignature::default();
        let m = random_model(&mut rng, &sig);
        for (x, y) in [("P[a]<=1/4 p", "P[a]>=3/4 !p"), ("P[b]>1/2 q", "!P[b]<=1/2 q"), ("P[a]<1 p", "!P[a]>=1 p")] {
            let (fx, fy) = (parse_formula(x).unwrap(), parse_formula(y).unwrap());
            match (extension(&m, &Valuation::new(), &fx), extension(&m, &Valuation::new(), &fy)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{} vs {}: {:?} {:?}", x, y, a, b),
            }
        }
    }
}
