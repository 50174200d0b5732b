use itertools::Itertools;

use crate::eval::{common_prob_stages, everyone_set, EvalError, Evaluator, Valuation};
use crate::model::{full_set, Model, StateSet};
use crate::parser::{model_to_json, print_formula};
use crate::rational::Rational01;
use crate::report::{CheckReport, Verdict};
use crate::syntax::{iterate_e, iterate_f, Formula, Group};

use super::enumerate::enumerate_models;
use super::{OracleError, SearchBudget};

/// Totals from [`fixed_point_check`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixpointStats {
    /// Models enumerated.
    pub models: u64,
    /// Models checked: one per isomorphism class.
    pub representatives: u64,
    /// (model, group) pairs where `C_G p` was compared with the iterates.
    pub common_checks: u64,
    /// (model, group, threshold) pairs where the `C_G^r p` stages were checked.
    pub prob_checks: u64,
    /// Longest stabilization seen, in steps.
    pub max_steps: usize,
    pub mismatches: u64,
}

fn mismatch(report: &mut CheckReport, stats: &mut FixpointStats, model: &Model, what: String) {
    stats.mismatches += 1;
    if stats.mismatches == 1 {
        report.set("first-mismatch", what);
        report.artifact("mismatch.json", model_to_json(model));
    }
}

/// `p`'s extension followed by every access mask, agent-major.
fn encode(model: &Model, a: &StateSet, perm: &[usize], swap: bool) -> Vec<u64> {
    let n = model.n_states();
    let image = |set: &StateSet| set.ones().map(|t| 1u64 << perm[t]).sum::<u64>();
    let k = model.agents().len();
    let mut out = vec![0u64; 1 + k * n];
    out[0] = image(a);
    for i in 0..k {
        let j = if swap { k - 1 - i } else { i };
        for s in 0..n {
            out[1 + j * n + perm[s]] = image(model.access(i, s));
        }
    }
    out
}

/// True when no renaming of states (and, for two agents, no swap of the
/// agents) gives a lexicographically smaller encoding.
fn is_canonical(model: &Model, a: &StateSet) -> bool {
    let n = model.n_states();
    let identity: Vec<usize> = (0..n).collect();
    let own = encode(model, a, &identity, false);
    let swaps: &[bool] = if model.agents().len() == 2 { &[false, true] } else { &[false] };
    (0..n).permutations(n).all(|perm| swaps.iter().all(|&swap| encode(model, a, &perm, swap) >= own))
}

fn ext(ev: &mut Evaluator, f: &Formula) -> Result<StateSet, OracleError> {
    ev.extension(&Valuation::new(), f).map_err(|e: EvalError| OracleError::Eval(e.to_string()))
}

/// Exhaustively compares the fixed-point operators with their iterates on
/// every budget model (over the single proposition `p`, every agent subset
/// of `a`, `b` as the group). Every checked property is invariant under
/// renaming states and swapping the agents, so one model per isomorphism
/// class is checked.
///
/// For `C_G p`: the evaluated extension must equal both
/// `⋂_{m=1..|S|+2} [(E_G)^m p]` evaluated as formulas and the same
/// intersection computed by iterating `E_G` on sets. For `C_G^r p` at each
/// threshold in `thresholds`: the stages must decrease, repeat within `|S|`
/// steps and end at the evaluated extension. On models with at most
/// `formula_states` states the iterates are also evaluated as formulas
/// (`(E_G)^m p` and `(F_G^r)^m p`) and compared.
pub fn fixed_point_check(
    b: &SearchBudget,
    thresholds: &[Rational01],
    formula_states: usize,
) -> Result<(CheckReport, FixpointStats), OracleError> {
    let budget = SearchBudget { relations: vec![("p".to_string(), 0)], max_domain: 1, ..b.clone() };
    let models = enumerate_models(&budget)?;
    let p = Formula::prop("p");
    let groups: Vec<Group> = match budget.max_agents {
        1 => vec![Group::of(&["a"])],
        _ => vec![Group::of(&["a", "b"]), Group::of(&["a"]), Group::of(&["b"])],
    };
    let max_iter = budget.max_states as u32 + 2;
    let iterates: Vec<Vec<Formula>> =
        groups.iter().map(|g| (1..=max_iter).map(|m| iterate_e(g, m, p.clone()).expect("m >= 1")).collect()).collect();
    let commons: Vec<Formula> = groups.iter().map(|g| Formula::common(g.clone(), p.clone())).collect();
    let f_iterates: Vec<Vec<Vec<Formula>>> = groups
        .iter()
        .map(|g| thresholds.iter().map(|r| (0..=max_iter).map(|m| iterate_f(g, r, m, &p)).collect()).collect())
        .collect();
    let common_probs: Vec<Vec<Formula>> = groups
        .iter()
        .map(|g| thresholds.iter().map(|r| Formula::common_prob(g.clone(), r.clone(), p.clone())).collect())
        .collect();

    let mut report = CheckReport::new(Verdict::ValidInSuite);
    let mut stats = FixpointStats::default();
    for model in models {
        stats.models += 1;
        let n = model.n_states();
        let mut ev = Evaluator::new(&model);
        let a = ext(&mut ev, &p)?;
        if !is_canonical(&model, &a) {
            continue;
        }
        stats.representatives += 1;
        for (gi, group) in groups.iter().enumerate() {
            let agents = model.resolve_group(group).map_err(|e| OracleError::Eval(e.to_string()))?;
            let c = ext(&mut ev, &commons[gi])?;
            let mut by_formula = c.clone();
            let mut by_sets = full_set(n);
            let mut cur = a.clone();
            for _ in 0..n + 2 {
                cur = everyone_set(&model, &agents, &cur);
                by_sets.intersect_with(&cur);
            }
            if n <= formula_states {
                by_formula = full_set(n);
                for f in &iterates[gi][..n + 2] {
                    by_formula.intersect_with(&ext(&mut ev, f)?);
                }
            }
            stats.common_checks += 1;
            if c != by_formula || c != by_sets {
                let text = print_formula(&commons[gi]);
                mismatch(&mut report, &mut stats, &model, format!("{text}: evaluated {:?}, iterates {:?}, set iterates {:?}", model.state_names(&c), model.state_names(&by_formula), model.state_names(&by_sets)));
            }
            for (ri, r) in thresholds.iter().enumerate() {
                stats.prob_checks += 1;
                let text = print_formula(&common_probs[gi][ri]);
                let stages = match common_prob_stages(&model, &agents, r, &a) {
                    Ok(s) => s,
                    Err(_) => {
                        mismatch(&mut report, &mut stats, &model, format!("{text}: stage not measurable"));
                        continue;
                    }
                };
                let steps = stages.len() - 2;
                stats.max_steps = stats.max_steps.max(steps);
                if steps > n {
                    mismatch(&mut report, &mut stats, &model, format!("{text}: {steps} steps on {n} states"));
                }
                if let Some(m) = stages.windows(2).position(|w| !w[1].is_subset(&w[0])) {
                    mismatch(&mut report, &mut stats, &model, format!("{text}: stage {} not inside stage {m}", m + 1));
                }
                if n > formula_states {
                    continue;
                }
                for (m, stage) in stages.iter().enumerate() {
                    let f = &f_iterates[gi][ri][m];
                    if ext(&mut ev, f)? != *stage {
                        mismatch(&mut report, &mut stats, &model, format!("{text}: stage {m} differs from {}", print_formula(f)));
                    }
                }
                let cr = ext(&mut ev, &common_probs[gi][ri])?;
                if Some(&cr) != stages.last() {
                    mismatch(&mut report, &mut stats, &model, format!("{text}: evaluated {:?}", model.state_names(&cr)));
                }
            }
        }
    }
    report.set("models", stats.models);
    report.set("isomorphism-classes", stats.representatives);
    report.set("common-checks", stats.common_checks);
    report.set("probabilistic-checks", stats.prob_checks);
    report.set("max-stabilization-steps", stats.max_steps);
    report.set("mismatches", stats.mismatches);
    if stats.mismatches > 0 {
        report.verdict = Verdict::UnsatAtState;
    }
    Ok((report, stats))
}
