//! The satisfaction relation, computed bottom-up as sets of states.
//!
//! An [`Evaluator`] borrows an immutable [`Model`] and memoizes extensions
//! per (subformula, values of its free variables) within one top-level call.
//! Use one evaluator per thread; the model itself can be shared freely.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::model::{full_set, Model, ModelError, StateSet};
use crate::parser::print_formula;
use crate::rational::Rational01;
use crate::syntax::{free_vars, Formula, Group, Term, Var, FALSUM};

/// Variable assignment into domain indices.
pub type Valuation = BTreeMap<Var, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown agent or group `{0}`")]
    UnknownAgent(String),
    #[error("relation `{0}` is not interpreted by the model")]
    UnknownRelation(String),
    #[error("function `{0}` is not interpreted by the model")]
    UnknownFunction(String),
    #[error("symbol `{symbol}` has arity {expected} in the model but is applied to {found} arguments")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("[{formula}] is not measurable for agent {agent} at state {state}: it splits the atom {{{}}}", .atom.join(", "))]
    NotMeasurable { formula: String, agent: String, state: String, atom: Vec<String> },
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownAgent(a) => EvalError::UnknownAgent(a),
            ModelError::Invalid(v) => EvalError::UnknownAgent(format!("{v:?}")),
        }
    }
}

/// `{s | 𝒦_i(s) ⊆ a}`
pub fn know_set(model: &Model, agent: usize, a: &StateSet) -> StateSet {
    let n = model.n_states();
    let mut out = StateSet::with_capacity(n);
    out.extend((0..n).filter(|&s| model.access(agent, s).is_subset(a)));
    out
}

/// `{s | μ_{i,s}(a ∩ S_{i,s}) >= r}`; on failure returns the offending
/// state and atom index.
pub fn prob_set(model: &Model, agent: usize, r: &Rational01, a: &StateSet) -> Result<StateSet, (usize, usize)> {
    let n = model.n_states();
    let mut out = StateSet::with_capacity(n);
    for s in 0..n {
        let mu = model.measure(agent, s, a).map_err(|e| (s, e.atom))?;
        if mu >= *r {
            out.insert(s);
        }
    }
    Ok(out)
}

/// `⋂_{i∈G} K_i(a)`
pub fn everyone_set(model: &Model, agents: &[usize], a: &StateSet) -> StateSet {
    let mut out = full_set(model.n_states());
    for &i in agents {
        out.intersect_with(&know_set(model, i, a));
    }
    out
}

/// `⋂_{i∈G} K_i(P_{i,>=r} a)`
pub fn everyone_prob_set(model: &Model, agents: &[usize], r: &Rational01, a: &StateSet) -> Result<StateSet, (usize, usize, usize)> {
    let mut out = full_set(model.n_states());
    for &i in agents {
        let p = prob_set(model, i, r, a).map_err(|(s, atom)| (i, s, atom))?;
        out.intersect_with(&know_set(model, i, &p));
    }
    Ok(out)
}

/// States all of whose successors (one or more steps along `⋃_{i∈G} 𝒦_i`)
/// lie in `a`.
pub fn common_set(model: &Model, agents: &[usize], a: &StateSet) -> StateSet {
    let n = model.n_states();
    // bad: states that reach the complement of `a` in at least one step
    let mut bad = StateSet::with_capacity(n);
    let mut frontier: Vec<usize> = Vec::new();
    for s in 0..n {
        let hits_outside = agents.iter().any(|&i| model.access(i, s).ones().any(|t| !a.contains(t)));
        if hits_outside {
            bad.insert(s);
            frontier.push(s);
        }
    }
    while let Some(t) = frontier.pop() {
        for s in 0..n {
            if !bad.contains(s) && agents.iter().any(|&i| model.access(i, s).contains(t)) {
                bad.insert(s);
                frontier.push(s);
            }
        }
    }
    bad.toggle_range(..);
    bad
}

/// The stages `X_0 = S`, `X_{m+1} = E_G^r(a ∩ X_m)` up to and including the
/// first repeated stage; the last entry is the extension of `C_G^r`. Stage
/// `m` is the extension of `(F_G^r)^m φ` when `a` is that of `φ`.
pub fn common_prob_stages(
    model: &Model,
    agents: &[usize],
    r: &Rational01,
    a: &StateSet,
) -> Result<Vec<StateSet>, (usize, usize, usize, usize)> {
    let mut stages = vec![full_set(model.n_states())];
    loop {
        let m = stages.len() - 1;
        let mut event = a.clone();
        event.intersect_with(&stages[m]);
        let next = everyone_prob_set(model, agents, r, &event).map_err(|(i, s, atom)| (m, i, s, atom))?;
        let done = next == stages[m];
        stages.push(next);
        if done {
            return Ok(stages);
        }
    }
}

pub struct Evaluator<'m> {
    model: &'m Model,
    memo: HashMap<(usize, Vec<usize>), StateSet>,
    fv: HashMap<usize, Vec<Var>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Self {
        Evaluator { model, memo: HashMap::new(), fv: HashMap::new() }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn eval_term(&self, v: &Valuation, t: &Term) -> Result<usize, EvalError> {
        match t {
            Term::Var(x) => v.get(x).copied().ok_or_else(|| EvalError::UnboundVariable(x.clone())),
            Term::App(f, args) => {
                let table = self.model.function(f).ok_or_else(|| EvalError::UnknownFunction(f.clone()))?;
                if table.arity != args.len() {
                    return Err(EvalError::Arity { symbol: f.clone(), expected: table.arity, found: args.len() });
                }
                let vals = args.iter().map(|a| self.eval_term(v, a)).collect::<Result<Vec<_>, _>>()?;
                Ok(table.apply(&vals).expect("validated function tables are total"))
            }
        }
    }

    /// `{s | (M, s, v) ⊨ f}`.
    pub fn extension(&mut self, v: &Valuation, f: &Formula) -> Result<StateSet, EvalError> {
        self.memo.clear();
        self.fv.clear();
        let out = self.ext(v, f);
        self.memo.clear();
        self.fv.clear();
        out
    }

    pub fn satisfies(&mut self, state: usize, v: &Valuation, f: &Formula) -> Result<bool, EvalError> {
        Ok(self.extension(v, f)?.contains(state))
    }

    /// True at every state under the empty valuation.
    pub fn valid(&mut self, f: &Formula) -> Result<bool, EvalError> {
        let ext = self.extension(&Valuation::new(), f)?;
        Ok(ext.count_ones(..) == self.model.n_states())
    }

    fn group(&self, g: &Group) -> Result<Vec<usize>, EvalError> {
        Ok(self.model.resolve_group(g)?)
    }

    fn agent(&self, a: &crate::syntax::AgentId) -> Result<usize, EvalError> {
        self.model.agent_index(a).ok_or_else(|| EvalError::UnknownAgent(a.to_string()))
    }

    fn not_measurable(&self, formula: String, agent: usize, state: usize, atom: usize) -> EvalError {
        let space = self.model.space(agent, state);
        EvalError::NotMeasurable {
            formula,
            agent: self.model.agents()[agent].to_string(),
            state: self.model.states()[state].clone(),
            atom: self.model.state_names(&space.atoms()[atom]),
        }
    }

    fn key(&mut self, v: &Valuation, f: &Formula) -> (usize, Vec<usize>) {
        let ptr = f as *const Formula as usize;
        let vars = self.fv.entry(ptr).or_insert_with(|| free_vars(f).into_iter().collect());
        (ptr, vars.iter().map(|x| v.get(x).copied().unwrap_or(usize::MAX)).collect())
    }

    fn ext(&mut self, v: &Valuation, f: &Formula) -> Result<StateSet, EvalError> {
        if let Formula::Atom(..) = f {
            return self.atom(v, f);
        }
        let key = self.key(v, f);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let model = self.model;
        let out = match f {
            Formula::Atom(..) => unreachable!("handled above"),
            Formula::Not(g) => {
                let mut s = self.ext(v, g)?;
                s.toggle_range(..);
                s
            }
            Formula::And(a, b) => {
                let mut s = self.ext(v, a)?;
                s.intersect_with(&self.ext(v, b)?);
                s
            }
            Formula::Forall(x, g) => {
                let mut out = model.all_states();
                let mut w = v.clone();
                for d in 0..model.domain().len() {
                    w.insert(x.clone(), d);
                    out.intersect_with(&self.ext(&w, g)?);
                }
                out
            }
            Formula::Know(i, g) => {
                let i = self.agent(i)?;
                know_set(model, i, &self.ext(v, g)?)
            }
            Formula::Everyone(gr, g) => {
                let agents = self.group(gr)?;
                everyone_set(model, &agents, &self.ext(v, g)?)
            }
            Formula::Common(gr, g) => {
                let agents = self.group(gr)?;
                common_set(model, &agents, &self.ext(v, g)?)
            }
            Formula::Prob(i, r, g) => {
                let i = self.agent(i)?;
                let inner = self.ext(v, g)?;
                prob_set(model, i, r, &inner).map_err(|(s, atom)| self.not_measurable(print_formula(g), i, s, atom))?
            }
            Formula::EveryoneProb(gr, r, g) => {
                let agents = self.group(gr)?;
                let inner = self.ext(v, g)?;
                everyone_prob_set(model, &agents, r, &inner)
                    .map_err(|(i, s, atom)| self.not_measurable(print_formula(g), i, s, atom))?
            }
            Formula::CommonProb(gr, r, g) => {
                let agents = self.group(gr)?;
                let inner = self.ext(v, g)?;
                let stages = common_prob_stages(model, &agents, r, &inner).map_err(|(m, i, s, atom)| {
                    let event = Formula::and((**g).clone(), crate::syntax::iterate_f(gr, r, m as u32, g));
                    self.not_measurable(print_formula(&event), i, s, atom)
                })?;
                stages.last().cloned().expect("at least one stage")
            }
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn atom(&mut self, v: &Valuation, f: &Formula) -> Result<StateSet, EvalError> {
        let Formula::Atom(rel, args) = f else { unreachable!() };
        let n = self.model.n_states();
        let table = match self.model.relation(rel) {
            Some(t) => t,
            None if rel == FALSUM && args.is_empty() => return Ok(StateSet::with_capacity(n)),
            None => return Err(EvalError::UnknownRelation(rel.clone())),
        };
        if table.arity != args.len() {
            return Err(EvalError::Arity { symbol: rel.clone(), expected: table.arity, found: args.len() });
        }
        let vals = args.iter().map(|a| self.eval_term(v, a)).collect::<Result<Vec<_>, _>>()?;
        let mut out = StateSet::with_capacity(n);
        out.extend((0..n).filter(|&s| table.holds(s, &vals)));
        Ok(out)
    }
}

/// One-shot convenience around [`Evaluator::satisfies`].
pub fn satisfies(model: &Model, state: usize, v: &Valuation, f: &Formula) -> Result<bool, EvalError> {
    Evaluator::new(model).satisfies(state, v, f)
}

/// One-shot convenience around [`Evaluator::extension`].
pub fn extension(model: &Model, v: &Valuation, f: &Formula) -> Result<StateSet, EvalError> {
    Evaluator::new(model).extension(v, f)
}
