use std::collections::BTreeMap;

use crate::eval::{EvalError, Evaluator, Valuation};
use crate::model::{state_set, Model, ModelBuilder, ProbSpace, StateSet};
use crate::parser::model_to_json;
use crate::rational::Rational01;
use crate::report::{CheckReport, Verdict};
use crate::syntax::{free_vars, AgentId, Formula};

use super::{AtomMode, OracleError, SearchBudget, Signature, SpaceMode};

const AGENT_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn agent_names(k: usize) -> Vec<AgentId> {
    (0..k).map(|i| AgentId::new(AGENT_NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("i{i}")))).collect()
}

/// All set partitions of `members`, in restricted-growth order.
fn partitions(members: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn go(members: &[usize], ix: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if ix == members.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(members[ix]);
            go(members, ix + 1, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![members[ix]]);
        go(members, ix + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(members, 0, &mut Vec::new(), &mut out);
    out
}

/// Weight vectors of length `k` drawn from `grid` and summing to exactly 1.
fn weightings(k: usize, grid: &[Rational01]) -> Vec<Vec<Rational01>> {
    fn go(k: usize, grid: &[Rational01], left: &num_rational::BigRational, acc: &mut Vec<Rational01>, out: &mut Vec<Vec<Rational01>>) {
        use num_traits::Zero;
        if acc.len() == k {
            if left.is_zero() {
                out.push(acc.clone());
            }
            return;
        }
        for w in grid {
            if w.as_big() <= left {
                acc.push(w.clone());
                go(k, grid, &(left - w.as_big()), acc, out);
                acc.pop();
            }
        }
    }
    let mut grid: Vec<Rational01> = grid.to_vec();
    grid.sort();
    grid.dedup();
    let mut out = Vec::new();
    go(k, &grid, Rational01::one().as_big(), &mut Vec::new(), &mut out);
    out
}

/// Every probability space over `n` states the grid can express.
pub fn space_options(n: usize, grid: &[Rational01], atoms: AtomMode) -> Vec<ProbSpace> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|s| mask & (1 << s) != 0).collect();
        let parts = match atoms {
            AtomMode::Singletons => vec![members.iter().map(|&s| vec![s]).collect()],
            AtomMode::Partitions => partitions(&members),
        };
        for part in parts {
            for ws in weightings(part.len(), grid) {
                let sets = part.iter().map(|b| state_set(n, b.iter().copied())).collect();
                out.push(ProbSpace::new(state_set(n, members.iter().copied()), sets, ws));
            }
        }
    }
    out
}

/// Streams every model of the budget's shapes, smallest first.
///
/// Shapes run over `1..=max_states` states and `1..=max_domain` elements;
/// the agents are always the first `max_agents` of `a, b, c, ...`. Within a
/// shape the choices (relation extensions per state, function tables,
/// accessibility, spaces) are enumerated as a mixed-radix counter.
#[derive(Debug, Clone)]
pub struct ModelEnumerator {
    agents: Vec<AgentId>,
    relations: Vec<(String, usize)>,
    functions: Vec<(String, usize)>,
    mode: SpaceMode,
    atoms: AtomMode,
    grid: Vec<Rational01>,
    shapes: Vec<(usize, usize)>,
    shape: usize,
    radices: Vec<u64>,
    digits: Vec<u64>,
    spaces: Vec<ProbSpace>,
    started: bool,
    total: u128,
}

fn pow(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

impl ModelEnumerator {
    pub(super) fn new(
        b: &SearchBudget,
        agents: Vec<AgentId>,
        relations: Vec<(String, usize)>,
        functions: Vec<(String, usize)>,
    ) -> Result<Self, OracleError> {
        b.validate()?;
        let shapes: Vec<(usize, usize)> =
            (1..=b.max_states).flat_map(|n| (1..=b.max_domain).map(move |d| (n, d))).collect();
        let mut e = ModelEnumerator {
            agents,
            relations,
            functions,
            mode: b.spaces,
            atoms: b.atoms,
            grid: b.weight_grid.clone(),
            shapes,
            shape: 0,
            radices: Vec::new(),
            digits: Vec::new(),
            spaces: Vec::new(),
            started: false,
            total: 0,
        };
        let mut total: u128 = 0;
        for &(n, d) in &e.shapes {
            total = total.saturating_add(e.radices_for(n, d).iter().fold(1u128, |acc, r| acc.saturating_mul(*r)));
        }
        if total > b.cap as u128 {
            return Err(OracleError::TooLarge { count: total, cap: b.cap });
        }
        e.total = total;
        Ok(e)
    }

    fn radices_for(&self, n: usize, d: usize) -> Vec<u128> {
        let (n128, d128) = (n as u128, d as u128);
        let mut out = Vec::new();
        for (_, arity) in &self.relations {
            let tuples = pow(d128, *arity as u128);
            out.extend(std::iter::repeat(pow(2, tuples)).take(n));
        }
        for (_, arity) in &self.functions {
            out.push(pow(d128, pow(d128, *arity as u128)));
        }
        let k = self.agents.len();
        out.extend(std::iter::repeat(pow(2, n128)).take(k * n));
        if self.mode == SpaceMode::Grid {
            let options = self.space_count(n) as u128;
            out.extend(std::iter::repeat(options).take(k * n));
        }
        out
    }

    fn space_count(&self, n: usize) -> usize {
        space_options(n, &self.grid, self.atoms).len()
    }

    /// Number of models the stream yields.
    pub fn total(&self) -> u128 {
        self.total
    }

    fn enter_shape(&mut self) {
        let (n, d) = self.shapes[self.shape];
        self.radices = self.radices_for(n, d).into_iter().map(|r| r as u64).collect();
        self.digits = vec![0; self.radices.len()];
        self.spaces = match self.mode {
            SpaceMode::Grid => space_options(n, &self.grid, self.atoms),
            // indexed by access mask; mask 0 falls back to a point mass
            SpaceMode::Uniform => (0..1u64 << n).map(|mask| ProbSpace::uniform(&mask_set(n, mask))).collect(),
        };
    }

    /// Advances the counter; false once the current shape is exhausted.
    fn increment(&mut self) -> bool {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                return true;
            }
            self.digits[i] = 0;
        }
        false
    }

    fn current(&self) -> Model {
        let (n, d) = self.shapes[self.shape];
        let agent_refs: Vec<&str> = self.agents.iter().map(AgentId::as_str).collect();
        let mut mb = ModelBuilder::indexed(n, d, &agent_refs);
        let mut digits = self.digits.iter().copied();
        for (name, arity) in &self.relations {
            mb.relation(name, *arity);
            let tuples = d.pow(*arity as u32);
            for s in 0..n {
                let mask = digits.next().expect("relation digit");
                for t in 0..tuples {
                    if mask & (1 << t) != 0 {
                        mb.fact(name, s, decode(t, d, *arity));
                    }
                }
            }
        }
        for (name, arity) in &self.functions {
            let mut code = digits.next().expect("function digit");
            let mut table = BTreeMap::new();
            for t in 0..d.pow(*arity as u32) {
                table.insert(decode(t, d, *arity), (code % d as u64) as usize);
                code /= d as u64;
            }
            mb.function(name, *arity, table);
        }
        for i in 0..self.agents.len() {
            for s in 0..n {
                let mask = digits.next().expect("access digit");
                mb.access_set(i, s, mask_set(n, mask));
                if self.mode == SpaceMode::Uniform {
                    let space = if mask == 0 { ProbSpace::point(n, s) } else { self.spaces[mask as usize].clone() };
                    mb.space(i, s, space);
                }
            }
        }
        if self.mode == SpaceMode::Grid {
            for i in 0..self.agents.len() {
                for s in 0..n {
                    let choice = digits.next().expect("space digit") as usize;
                    mb.space(i, s, self.spaces[choice].clone());
                }
            }
        }
        mb.build_unchecked()
    }
}

fn mask_set(n: usize, mask: u64) -> StateSet {
    state_set(n, (0..n).filter(|t| mask & (1 << t) != 0))
}

/// Tuple number `t` of `D^arity`, most significant position first.
fn decode(mut t: usize, d: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = t % d;
        t /= d;
    }
    out
}

impl Iterator for ModelEnumerator {
    type Item = Model;

    fn next(&mut self) -> Option<Model> {
        if self.shape >= self.shapes.len() {
            return None;
        }
        if !self.started {
            self.started = true;
            self.enter_shape();
            return Some(self.current());
        }
        if !self.increment() {
            self.shape += 1;
            if self.shape >= self.shapes.len() {
                return None;
            }
            self.enter_shape();
        }
        Some(self.current())
    }
}

pub fn enumerate_models(b: &SearchBudget) -> Result<ModelEnumerator, OracleError> {
    ModelEnumerator::new(b, agent_names(b.max_agents), b.relations.clone(), Vec::new())
}

pub fn count_models(b: &SearchBudget) -> Result<u128, OracleError> {
    enumerate_models(b).map(|e| e.total())
}

#[derive(Debug, Clone)]
pub enum FindOutcome {
    Found { model: Model, state: usize, examined: u64 },
    /// Not an unsatisfiability verdict.
    NotFoundWithinBudget { examined: u64, not_measurable: u64 },
}

impl FindOutcome {
    pub fn report(&self, f: &Formula) -> CheckReport {
        let formula = crate::parser::print_formula(f);
        match self {
            FindOutcome::Found { model, state, examined } => {
                let mut r = CheckReport::new(Verdict::Sat)
                    .detail("formula", formula)
                    .detail("state", model.states()[*state].clone())
                    .detail("models-examined", *examined);
                r.artifact("witness.json", model_to_json(model));
                r
            }
            FindOutcome::NotFoundWithinBudget { examined, not_measurable } => CheckReport::new(Verdict::NotFoundWithinBudget)
                .detail("formula", formula)
                .detail("models-examined", *examined)
                .detail("skipped-not-measurable", *not_measurable)
                .detail("note", "no model within the budget; this is not a proof of unsatisfiability"),
        }
    }
}

/// Searches the budget's models for a state satisfying the sentence `f`.
///
/// The signature is the budget's relations plus the formula's symbols;
/// the agents are exactly those the formula mentions.
pub fn find_model(f: &Formula, b: &SearchBudget) -> Result<FindOutcome, OracleError> {
    let free = free_vars(f);
    if !free.is_empty() {
        return Err(OracleError::NotSentence(free.into_iter().collect()));
    }
    let sig = Signature::of(f);
    let mut agents: Vec<AgentId> = sig.agents.iter().cloned().collect();
    if agents.is_empty() {
        agents.push(AgentId::new("a"));
    }
    if agents.len() > b.max_agents {
        return Err(OracleError::TooManyAgents { needed: agents.len(), allowed: b.max_agents });
    }
    let mut relations: BTreeMap<String, usize> = b.relations.iter().cloned().collect();
    relations.extend(sig.relations);
    let e = ModelEnumerator::new(b, agents, relations.into_iter().collect(), sig.functions.into_iter().collect())?;
    let (mut examined, mut not_measurable) = (0u64, 0u64);
    let v = Valuation::new();
    for model in e {
        examined += 1;
        let ext = Evaluator::new(&model).extension(&v, f);
        match ext {
            Ok(set) => {
                if let Some(state) = set.ones().next() {
                    return Ok(FindOutcome::Found { model, state, examined });
                }
            }
            Err(EvalError::NotMeasurable { .. }) => not_measurable += 1,
            Err(other) => return Err(OracleError::Eval(other.to_string())),
        }
    }
    Ok(FindOutcome::NotFoundWithinBudget { examined, not_measurable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    #[test]
    fn restricted_growth_partitions() {
        assert_eq!(partitions(&[0, 1, 2]).len(), 5);
        assert_eq!(partitions(&[0, 1, 2, 3]).len(), 15);
    }

    #[test]
    fn weightings_are_normalized() {
        let grid = vec![Rational01::zero(), Rational01::frac(1, 2), Rational01::one()];
        assert_eq!(weightings(2, &grid).len(), 3);
        assert_eq!(space_options(2, &grid, AtomMode::Singletons).len(), 5);
        assert_eq!(space_options(2, &grid, AtomMode::Partitions).len(), 6);
    }

    #[test]
    fn one_state_one_agent() {
        let b = SearchBudget {
            max_states: 1,
            max_agents: 1,
            weight_grid: vec![Rational01::one()],
            spaces: SpaceMode::Grid,
            ..SearchBudget::default()
        };
        assert_eq!(enumerate_models(&b).unwrap().count(), 4);
        assert_eq!(count_models(&b).unwrap(), 4);
    }

    #[test]
    fn enumerated_models_revalidate() {
        for spaces in [SpaceMode::Uniform, SpaceMode::Grid] {
            let b = SearchBudget {
                max_states: 2,
                max_agents: 1,
                weight_grid: vec![Rational01::zero(), Rational01::frac(1, 2), Rational01::one()],
                spaces,
                atoms: AtomMode::Partitions,
                ..SearchBudget::default()
            };
            for m in enumerate_models(&b).unwrap() {
                let back = crate::parser::parse_model(&model_to_json(&m)).unwrap();
                assert_eq!(model_to_json(&back), model_to_json(&m));
            }
        }
    }

    #[test]
    fn zero_states_rejected() {
        let b = SearchBudget { max_states: 0, ..SearchBudget::default() };
        assert_eq!(enumerate_models(&b).unwrap_err(), OracleError::EmptyBudget("max_states"));
    }

    #[test]
    fn find_needs_a_sentence() {
        let f = parse_formula("R(x)").unwrap();
        assert!(matches!(find_model(&f, &SearchBudget::default()), Err(OracleError::NotSentence(_))));
    }

    #[test]
    fn decoding_tuples() {
        assert_eq!(decode(5, 2, 3), vec![1, 0, 1]);
        assert_eq!(decode(0, 3, 0), Vec::<usize>::new());
    }
}
