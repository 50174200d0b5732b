use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::eval::{EvalError, Evaluator, Valuation};
use crate::parser::{model_to_json, parse_formula, print_formula};
use crate::report::{CheckReport, Verdict};
use crate::syntax::Formula;

use super::enumerate::ModelEnumerator;
use super::{OracleError, SearchBudget, Signature};

/// Named groups of derived theorems, plus the known non-theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Distribution and conjunction laws for `K_i`, `E_G`, `C_G`.
    EpistemicDistribution,
    /// `C_G φ -> E_G(φ ∧ C_G φ)`.
    FixedPoint,
    /// `E_G φ <-> ⋀ K_i φ` and its probabilistic analogue.
    FiniteGroupEquivalence,
    /// Closure of `K_i^r`, `E_G^r`, `C_G^r` under a provable implication.
    ProbabilisticMonotonicity,
    /// Formulas that must have a counterexample.
    ExpectedInvalid,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::EpistemicDistribution,
        Family::FixedPoint,
        Family::FiniteGroupEquivalence,
        Family::ProbabilisticMonotonicity,
        Family::ExpectedInvalid,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::EpistemicDistribution => "epistemic-distribution",
            Family::FixedPoint => "fixed-point",
            Family::FiniteGroupEquivalence => "finite-group-equivalence",
            Family::ProbabilisticMonotonicity => "probabilistic-monotonicity",
            Family::ExpectedInvalid => "expected-invalid",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL.into_iter().find(|f| f.as_str() == s).ok_or_else(|| format!("unknown family `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteInstance {
    pub label: String,
    pub formula: Formula,
    pub expect_valid: bool,
}

const PAIRS: [(&str, &str); 3] = [("p", "q"), ("!p", "p & q"), ("K[a] q", "p | q")];
const GROUPS: [&str; 3] = ["{a,b}", "{a}", "{b}"];
const THRESHOLDS: [&str; 3] = ["1/3", "1/2", "1"];

fn inst(out: &mut Vec<SuiteInstance>, label: String, text: String, expect_valid: bool) {
    let formula = parse_formula(&text).unwrap_or_else(|e| panic!("suite formula `{text}`: {e}"));
    out.push(SuiteInstance { label, formula, expect_valid });
}

/// The concrete formulas a family checks, over agents `a`, `b` and
/// propositions `p`, `q`.
pub fn suite_instances(family: Family) -> Vec<SuiteInstance> {
    let mut out = Vec::new();
    match family {
        Family::EpistemicDistribution => {
            for (phi, psi) in PAIRS {
                for i in ["a", "b"] {
                    inst(&mut out, format!("K-distribution {i}"), format!("K[{i}] (({phi}) -> ({psi})) -> (K[{i}] ({phi}) -> K[{i}] ({psi}))"), true);
                    inst(&mut out, format!("K-conjunction {i}"), format!("K[{i}] (({phi}) & ({psi})) <-> K[{i}] ({phi}) & K[{i}] ({psi})"), true);
                }
                for g in GROUPS {
                    inst(&mut out, format!("E-distribution {g}"), format!("E{g} (({phi}) -> ({psi})) -> (E{g} ({phi}) -> E{g} ({psi}))"), true);
                    inst(&mut out, format!("C-distribution {g}"), format!("C{g} (({phi}) -> ({psi})) -> (C{g} ({phi}) -> C{g} ({psi}))"), true);
                    inst(&mut out, format!("E-conjunction {g}"), format!("E{g} (({phi}) & ({psi})) <-> E{g} ({phi}) & E{g} ({psi})"), true);
                }
            }
            inst(&mut out, "K-conjunction of three".into(), "K[a] (p & q & !p) <-> K[a] p & K[a] q & K[a] !p".into(), true);
            inst(&mut out, "E-conjunction of three".into(), "E{a,b} (p & q & K[b] p) <-> E{a,b} p & E{a,b} q & E{a,b} K[b] p".into(), true);
        }
        Family::FixedPoint => {
            for phi in ["p", "!q", "p & K[b] q", "P[a]>=1/2 p"] {
                for g in GROUPS {
                    inst(&mut out, format!("fixed point {g}"), format!("C{g} ({phi}) -> E{g} (({phi}) & C{g} ({phi}))"), true);
                }
            }
        }
        Family::FiniteGroupEquivalence => {
            for phi in ["p", "p -> q", "K[b] !q"] {
                inst(&mut out, "E as conjunction {a,b}".into(), format!("E{{a,b}} ({phi}) <-> K[a] ({phi}) & K[b] ({phi})"), true);
                inst(&mut out, "E as conjunction {a}".into(), format!("E{{a}} ({phi}) <-> K[a] ({phi})"), true);
                for r in THRESHOLDS {
                    inst(
                        &mut out,
                        format!("E^{r} as conjunction {{a,b}}"),
                        format!("Es{{a,b,{r}}} ({phi}) <-> Kr[a,{r}] ({phi}) & Kr[b,{r}] ({phi})"),
                        true,
                    );
                    inst(&mut out, format!("E^{r} as conjunction {{b}}"), format!("Es{{b,{r}}} ({phi}) <-> Kr[b,{r}] ({phi})"), true);
                }
            }
        }
        Family::ProbabilisticMonotonicity => {
            for r in ["1/4", "1/2", "2/3", "1"] {
                for i in ["a", "b"] {
                    inst(&mut out, format!("K^{r} monotone {i}"), format!("Kr[{i},{r}] (p & q) -> Kr[{i},{r}] p"), true);
                }
                for g in ["a,b", "a"] {
                    inst(&mut out, format!("E^{r} monotone {{{g}}}"), format!("Es{{{g},{r}}} (p & q) -> Es{{{g},{r}}} p"), true);
                    inst(&mut out, format!("C^{r} monotone {{{g}}}"), format!("Cs{{{g},{r}}} (p & q) -> Cs{{{g},{r}}} p"), true);
                }
            }
            inst(&mut out, "E^1 distribution".into(), "Es{a,b,1} (p -> q) -> (Es{a,b,1/2} p -> Es{a,b,1/2} q)".into(), true);
        }
        Family::ExpectedInvalid => {
            for g in ["a,b", "a"] {
                inst(
                    &mut out,
                    format!("E^r distribution {{{g}}}"),
                    format!("Es{{{g},1/2}} (p -> q) -> (Es{{{g},1/2}} p -> Es{{{g},1/2}} q)"),
                    false,
                );
            }
        }
    }
    out
}

#[derive(Default)]
struct Tally {
    models: u64,
    not_measurable: u64,
    counterexample: Option<(String, String)>,
}

/// Checks every instance of `family` at every state of every model in the
/// budget (agents `a`, `b`; the budget's relations plus `p`, `q`).
///
/// Instances expected valid must hold everywhere; instances expected
/// invalid must fail somewhere.
pub fn validity_suite(family: Family, b: &SearchBudget) -> Result<CheckReport, OracleError> {
    let instances = suite_instances(family);
    if b.max_agents < 2 {
        return Err(OracleError::TooManyAgents { needed: 2, allowed: b.max_agents });
    }
    let mut sig = Signature::default();
    instances.iter().for_each(|i| sig.add(&i.formula));
    let mut relations: BTreeMap<String, usize> = b.relations.iter().cloned().collect();
    relations.extend(sig.relations);
    let models = ModelEnumerator::new(b, vec!["a".into(), "b".into()], relations.into_iter().collect(), Vec::new())?;
    let total = models.total();
    let mut tallies: Vec<Tally> = instances.iter().map(|_| Tally::default()).collect();
    let v = Valuation::new();
    for model in models {
        let mut ev = Evaluator::new(&model);
        for (inst, tally) in instances.iter().zip(tallies.iter_mut()) {
            match ev.extension(&v, &inst.formula) {
                Ok(ext) => {
                    tally.models += 1;
                    if tally.counterexample.is_none() {
                        if let Some(s) = (0..model.n_states()).find(|s| !ext.contains(*s)) {
                            tally.counterexample = Some((model.states()[s].clone(), model_to_json(&model)));
                        }
                    }
                }
                Err(EvalError::NotMeasurable { .. }) => tally.not_measurable += 1,
                Err(e) => return Err(OracleError::Eval(e.to_string())),
            }
        }
    }
    let mut report = CheckReport::new(Verdict::ValidInSuite).detail("family", family.as_str()).detail("models", total as u64);
    let mut lines = Vec::new();
    let mut broken_valid = false;
    let mut missing_counterexample = false;
    for (ix, (inst, tally)) in instances.iter().zip(&tallies).enumerate() {
        let text = print_formula(&inst.formula);
        let line = match (&tally.counterexample, inst.expect_valid) {
            (None, true) => format!("holds in {} models ({} skipped): {} :: {text}", tally.models, tally.not_measurable, inst.label),
            (Some((state, json)), true) => {
                broken_valid = true;
                report.artifact(format!("counterexample-{ix}.json"), json.clone());
                format!("FAILS at {state} (counterexample-{ix}.json): {} :: {text}", inst.label)
            }
            (Some((state, json)), false) => {
                report.artifact(format!("expected-invalid-{ix}.json"), json.clone());
                format!("EXPECTED-INVALID, counterexample at {state} (expected-invalid-{ix}.json): {} :: {text}", inst.label)
            }
            (None, false) => {
                missing_counterexample = true;
                format!("EXPECTED-INVALID but no counterexample within budget: {} :: {text}", inst.label)
            }
        };
        lines.push(line);
    }
    report.set("instances", lines);
    if broken_valid {
        report.verdict = Verdict::UnsatAtState;
    } else if missing_counterexample {
        report.verdict = Verdict::NotFoundWithinBudget;
    }
    Ok(report)
}
