use crate::eval::{Evaluator, Valuation};
use crate::model::{full_set, Model, ModelBuilder, ProbSpace};
use crate::parser::{model_to_json, print_formula};
use crate::rational::Rational01;
use crate::report::{CheckReport, Verdict};
use crate::syntax::{iterate_e, Formula, Group};

use super::OracleError;

/// Largest bound [`noncompactness_demo`] accepts.
pub const MAX_DEMO_BOUND: usize = 4;

/// `s0 -> s1 -> ... -> s{m+1} -> s{m+1}` for agents `a` and `b` (group `G`),
/// with `p` true on `s0..=sm` only. At `s0`, `(E_G)^k p` holds for `k <= m`
/// and `C_G p` fails.
pub fn chain_model(m: usize) -> Model {
    let n = m + 2;
    let mut mb = ModelBuilder::indexed(n, 1, &["a", "b"]);
    mb.group("G", &["a", "b"]).relation("p", 0).prop_on("p", 0..=m);
    for i in 0..2 {
        for s in 0..n {
            mb.edge(i, s, (s + 1).min(n - 1));
        }
    }
    mb.default_spaces();
    mb.build().expect("chain models are valid")
}

/// Two states, agent `i` considers both possible with weights `1 - 1/n` on
/// `s0` (where `p` holds) and `1/n` on `s1`.
pub fn threshold_model(n: usize) -> Model {
    let mut mb = ModelBuilder::indexed(2, 1, &["i"]);
    mb.relation("p", 0).prop_on("p", [0]);
    let low = Rational01::frac(1, n as i64);
    let space = ProbSpace::singletons(2, &[(0, low.complement()), (1, low)]);
    for s in 0..2 {
        mb.access_set(0, s, full_set(2));
        mb.space(0, s, space.clone());
    }
    mb.build().expect("threshold models are valid")
}

fn verify(model: &Model, formulas: &[Formula], state: usize) -> Result<bool, OracleError> {
    let mut ev = Evaluator::new(model);
    for f in formulas {
        if !ev.satisfies(state, &Valuation::new(), f).map_err(|e| OracleError::Eval(e.to_string()))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Witnesses for the finite parts of two unsatisfiable sets:
/// `{(E_G)^k p | k >= 1} ∪ {¬C_G p}` and `{P_{i,>=1-1/n} p | n >= 1} ∪ {¬P_{i,=1} p}`.
///
/// For each bound up to `m` a model is built and every member of the
/// finite part is re-checked at `s0`. The infinite sets themselves are
/// unsatisfiable; that is stated, not checked.
pub fn noncompactness_demo(m: usize) -> Result<CheckReport, OracleError> {
    if m == 0 || m > MAX_DEMO_BOUND {
        return Err(OracleError::DemoBound { m, max: MAX_DEMO_BOUND });
    }
    let group = Group::of(&["G"]);
    let p = Formula::prop("p");
    let mut all = true;
    let mut report = CheckReport::new(Verdict::Sat);
    for k in 1..=m {
        let mut set: Vec<Formula> = (1..=k as u32).map(|j| iterate_e(&group, j, p.clone()).expect("j >= 1")).collect();
        set.push(Formula::not(Formula::common(group.clone(), p.clone())));
        let model = chain_model(k);
        let ok = verify(&model, &set, 0)?;
        all &= ok;
        let text: Vec<String> = set.iter().map(print_formula).collect();
        report.set(&format!("common-knowledge-m{k}"), format!("{} at s0: {}", if ok { "satisfied" } else { "FAILED" }, text.join(", ")));
        report.artifact(format!("chain-m{k}.json"), model_to_json(&model));
    }
    for n in 1..=m {
        let mut set: Vec<Formula> = (1..=n as i64)
            .map(|j| Formula::prob("i", Rational01::frac(1, j).complement(), p.clone()))
            .collect();
        set.push(Formula::not(Formula::prob_eq("i", Rational01::one(), p.clone())));
        let model = threshold_model(n);
        let ok = verify(&model, &set, 0)?;
        all &= ok;
        let text: Vec<String> = set.iter().map(print_formula).collect();
        report.set(&format!("probability-n{n}"), format!("{} at s0: {}", if ok { "satisfied" } else { "FAILED" }, text.join(", ")));
        report.artifact(format!("threshold-n{n}.json"), model_to_json(&model));
    }
    report.set(
        "note",
        "each full infinite set is unsatisfiable; only its finite parts are checked here",
    );
    if !all {
        report.verdict = Verdict::UnsatAtState;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    #[test]
    fn chain_of_three() {
        let m = chain_model(1);
        let mut ev = Evaluator::new(&m);
        let f = parse_formula("E{G} p & !C{G} p").unwrap();
        assert!(ev.satisfies(0, &Valuation::new(), &f).unwrap());
        let g = parse_formula("E{G} E{G} p").unwrap();
        assert!(!ev.satisfies(0, &Valuation::new(), &g).unwrap());
    }

    #[test]
    fn demo_reports_sat() {
        let r = noncompactness_demo(3).unwrap();
        assert_eq!(r.verdict, Verdict::Sat);
        assert_eq!(r.artifacts.len(), 6);
        assert!(noncompactness_demo(0).is_err());
    }
}
