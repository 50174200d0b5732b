//! Finite Kripke structures with per-(agent, state) probability spaces.
//!
//! States, domain elements and agents are addressed by index internally;
//! names are kept for documents and reports. A probability space stores its
//! algebra as a partition of the sample into atoms, so the measurable sets
//! are exactly the unions of atoms.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational01;
use crate::syntax::{AgentId, Group};

/// A set of states, indexed as in [`Model::states`].
pub type StateSet = FixedBitSet;

pub fn state_set(n: usize, members: impl IntoIterator<Item = usize>) -> StateSet {
    let mut set = FixedBitSet::with_capacity(n);
    set.extend(members);
    set
}

pub fn full_set(n: usize) -> StateSet {
    let mut set = FixedBitSet::with_capacity(n);
    set.insert_range(..);
    set
}

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl Violation {
    fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { location: location.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("unknown agent or group `{0}`")]
    UnknownAgent(String),
}

/// The set `A ∩ S_{i,s}` cuts through an atom of the algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("set is not measurable: it splits atom #{atom}")]
pub struct NotMeasurable {
    pub atom: usize,
}

/// A finitely additive probability space `(S_{i,s}, χ_{i,s}, μ_{i,s})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbSpace {
    sample: StateSet,
    atoms: Vec<StateSet>,
    weights: Vec<Rational01>,
}

fn first(set: &StateSet) -> usize {
    set.ones().next().unwrap_or(usize::MAX)
}

impl ProbSpace {
    /// Atoms are put in canonical order (by least member); weights follow.
    pub fn new(sample: StateSet, atoms: Vec<StateSet>, weights: Vec<Rational01>) -> Self {
        let mut paired: Vec<_> = atoms.into_iter().zip(weights).collect();
        paired.sort_by_key(|(a, _)| first(a));
        let (atoms, weights) = paired.into_iter().unzip();
        ProbSpace { sample, atoms, weights }
    }

    /// Powerset algebra over `sample` with the given per-state weights.
    pub fn singletons(n: usize, weighted: &[(usize, Rational01)]) -> Self {
        let sample = state_set(n, weighted.iter().map(|(s, _)| *s));
        let atoms = weighted.iter().map(|(s, _)| state_set(n, [*s])).collect();
        let weights = weighted.iter().map(|(_, w)| w.clone()).collect();
        ProbSpace::new(sample, atoms, weights)
    }

    /// Equal weight on every state of `sample`, powerset algebra.
    pub fn uniform(sample: &StateSet) -> Self {
        let k = sample.count_ones(..).max(1) as i64;
        let w = Rational01::frac(1, k);
        let weighted: Vec<_> = sample.ones().map(|s| (s, w.clone())).collect();
        ProbSpace::singletons(sample.len(), &weighted)
    }

    /// The Dirac measure on `s`.
    pub fn point(n: usize, s: usize) -> Self {
        ProbSpace::singletons(n, &[(s, Rational01::one())])
    }

    pub fn sample(&self) -> &StateSet {
        &self.sample
    }

    pub fn atoms(&self) -> &[StateSet] {
        &self.atoms
    }

    pub fn weights(&self) -> &[Rational01] {
        &self.weights
    }

    pub fn is_powerset(&self) -> bool {
        self.atoms.iter().all(|a| a.count_ones(..) == 1)
    }

    /// `μ(A ∩ sample)`.
    pub fn measure(&self, a: &StateSet) -> Result<Rational01, NotMeasurable> {
        let mut total = BigRational::zero();
        for (ix, (atom, w)) in self.atoms.iter().zip(&self.weights).enumerate() {
            if atom.is_subset(a) {
                total += w.as_big();
            } else if !atom.is_disjoint(a) {
                return Err(NotMeasurable { atom: ix });
            }
        }
        Ok(Rational01::from_big(total).unwrap_or_else(|_| Rational01::one()))
    }

    /// Invariant violations, described relative to the owning space.
    pub fn problems(&self, n_states: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.sample.count_ones(..) == 0 {
            out.push("sample space is empty".to_string());
        }
        if self.sample.ones().any(|s| s >= n_states) {
            out.push("sample contains an undeclared state".to_string());
        }
        if self.atoms.len() != self.weights.len() {
            out.push("atoms and weights differ in number".to_string());
        }
        let mut union = FixedBitSet::with_capacity(self.sample.len());
        for (ix, atom) in self.atoms.iter().enumerate() {
            if atom.count_ones(..) == 0 {
                out.push(format!("atom #{ix} is empty"));
            }
            if !union.is_disjoint(atom) {
                out.push(format!("atom #{ix} overlaps an earlier atom"));
            }
            union.union_with(atom);
        }
        if union != self.sample {
            out.push("atoms do not partition the sample".to_string());
        }
        let sum: BigRational = self.weights.iter().map(|w| w.as_big().clone()).sum();
        if !sum.is_one() {
            out.push(format!("measure not normalized: weights sum to {sum}"));
        }
        out
    }
}

/// A rigid interpretation of a function symbol: `D^arity -> D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    pub arity: usize,
    pub table: BTreeMap<Vec<usize>, usize>,
}

impl FunctionTable {
    pub fn apply(&self, args: &[usize]) -> Option<usize> {
        self.table.get(args).copied()
    }
}

/// Per-state interpretation of a relation symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTable {
    pub arity: usize,
    pub per_state: Vec<BTreeSet<Vec<usize>>>,
}

impl RelationTable {
    pub fn holds(&self, state: usize, args: &[usize]) -> bool {
        self.per_state[state].contains(args)
    }
}

/// The model classes of the consistency/objectivity remarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassFlags {
    /// Every algebra is a powerset, so every formula is measurable. When
    /// false, measurability is checked per probability operator at
    /// evaluation time.
    pub meas: bool,
    pub con: bool,
    pub obj: bool,
    pub sdp: bool,
    pub unif: bool,
}

impl ClassFlags {
    pub fn names(&self) -> Vec<&'static str> {
        [(self.meas, "MEAS"), (self.con, "CON"), (self.obj, "OBJ"), (self.sdp, "SDP"), (self.unif, "UNIF")]
            .into_iter()
            .filter_map(|(on, name)| on.then_some(name))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    states: Vec<String>,
    domain: Vec<String>,
    agents: Vec<AgentId>,
    groups: BTreeMap<String, Vec<AgentId>>,
    functions: BTreeMap<String, FunctionTable>,
    relations: BTreeMap<String, RelationTable>,
    /// `access[i][s] = 𝒦_i(s)`
    access: Vec<Vec<StateSet>>,
    /// `prob[i][s] = 𝒫(i, s)`
    prob: Vec<Vec<ProbSpace>>,
    state_ix: HashMap<String, usize>,
    agent_ix: HashMap<AgentId, usize>,
}

impl Model {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_ix.get(name).copied()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_index(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == name)
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn agent_index(&self, agent: &AgentId) -> Option<usize> {
        self.agent_ix.get(agent).copied()
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<AgentId>> {
        &self.groups
    }

    pub fn functions(&self) -> &BTreeMap<String, FunctionTable> {
        &self.functions
    }

    pub fn relations(&self) -> &BTreeMap<String, RelationTable> {
        &self.relations
    }

    pub fn function(&self, name: &str) -> Option<&FunctionTable> {
        self.functions.get(name)
    }

    pub fn relation(&self, name: &str) -> Option<&RelationTable> {
        self.relations.get(name)
    }

    /// `𝒦_i(s)`
    pub fn access(&self, agent: usize, state: usize) -> &StateSet {
        &self.access[agent][state]
    }

    /// `𝒫(i, s)`
    pub fn space(&self, agent: usize, state: usize) -> &ProbSpace {
        &self.prob[agent][state]
    }

    pub fn all_states(&self) -> StateSet {
        full_set(self.n_states())
    }

    pub fn state_names(&self, set: &StateSet) -> Vec<String> {
        set.ones().map(|s| self.states[s].clone()).collect()
    }

    /// `μ_{i,s}(A ∩ S_{i,s})`.
    pub fn measure(&self, agent: usize, state: usize, a: &StateSet) -> Result<Rational01, NotMeasurable> {
        self.prob[agent][state].measure(a)
    }

    /// Agent indices of a group; members naming a declared group expand to
    /// that group's agents.
    pub fn resolve_group(&self, group: &Group) -> Result<Vec<usize>, ModelError> {
        let mut out = BTreeSet::new();
        for member in group.members() {
            if let Some(ix) = self.agent_index(member) {
                out.insert(ix);
            } else if let Some(agents) = self.groups.get(member.as_str()) {
                out.extend(agents.iter().filter_map(|a| self.agent_index(a)));
            } else {
                return Err(ModelError::UnknownAgent(member.to_string()));
            }
        }
        Ok(out.into_iter().collect())
    }

    pub fn classify(&self) -> ClassFlags {
        let n = self.n_states();
        let agents = 0..self.agents.len();
        let meas = self.prob.iter().flatten().all(ProbSpace::is_powerset);
        let con = agents.clone().all(|i| (0..n).all(|s| self.prob[i][s].sample.is_subset(&self.access[i][s])));
        let obj = (0..n).all(|s| agents.clone().all(|i| self.prob[i][s] == self.prob[0][s]));
        let sdp = agents
            .clone()
            .all(|i| (0..n).all(|s| self.access[i][s].ones().all(|t| self.prob[i][s] == self.prob[i][t])));
        let unif = agents.clone().all(|i| {
            (0..n).all(|s| self.prob[i][s].sample.ones().all(|t| self.prob[i][s] == self.prob[i][t]))
        });
        ClassFlags { meas, con, obj, sdp, unif }
    }

    /// Renames states by `perm` (old index -> new index), keeping names
    /// attached to their states.
    pub fn permute_states(&self, perm: &[usize]) -> Model {
        let n = self.n_states();
        let map_set = |set: &StateSet| state_set(n, set.ones().map(|s| perm[s]));
        let mut states = vec![String::new(); n];
        for (old, name) in self.states.iter().enumerate() {
            states[perm[old]] = name.clone();
        }
        let relations = self
            .relations
            .iter()
            .map(|(name, rel)| {
                let mut per_state = vec![BTreeSet::new(); n];
                for (old, tuples) in rel.per_state.iter().enumerate() {
                    per_state[perm[old]] = tuples.clone();
                }
                (name.clone(), RelationTable { arity: rel.arity, per_state })
            })
            .collect();
        let mut access = vec![vec![FixedBitSet::with_capacity(n); n]; self.agents.len()];
        let mut prob = vec![vec![ProbSpace::point(n, 0); n]; self.agents.len()];
        for i in 0..self.agents.len() {
            for old in 0..n {
                access[i][perm[old]] = map_set(&self.access[i][old]);
                let sp = &self.prob[i][old];
                prob[i][perm[old]] = ProbSpace::new(
                    map_set(&sp.sample),
                    sp.atoms.iter().map(map_set).collect(),
                    sp.weights.clone(),
                );
            }
        }
        Model::assemble(
            states,
            self.domain.clone(),
            self.agents.clone(),
            self.groups.clone(),
            self.functions.clone(),
            relations,
            access,
            prob,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        states: Vec<String>,
        domain: Vec<String>,
        agents: Vec<AgentId>,
        groups: BTreeMap<String, Vec<AgentId>>,
        functions: BTreeMap<String, FunctionTable>,
        relations: BTreeMap<String, RelationTable>,
        access: Vec<Vec<StateSet>>,
        prob: Vec<Vec<ProbSpace>>,
    ) -> Model {
        let state_ix = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let agent_ix = agents.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Model { states, domain, agents, groups, functions, relations, access, prob, state_ix, agent_ix }
    }
}

/// Index-based construction, used by generators and by the document reader.
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    states: Vec<String>,
    domain: Vec<String>,
    agents: Vec<AgentId>,
    groups: BTreeMap<String, Vec<AgentId>>,
    functions: BTreeMap<String, FunctionTable>,
    relations: BTreeMap<String, RelationTable>,
    access: Vec<Vec<StateSet>>,
    prob: Vec<Vec<Option<ProbSpace>>>,
}

impl ModelBuilder {
    pub fn new(states: Vec<String>, domain: Vec<String>, agents: Vec<AgentId>) -> Self {
        let (n, k) = (states.len(), agents.len());
        ModelBuilder {
            access: vec![vec![FixedBitSet::with_capacity(n); n]; k],
            prob: vec![vec![None; n]; k],
            states,
            domain,
            agents,
            groups: BTreeMap::new(),
            functions: BTreeMap::new(),
            relations: BTreeMap::new(),
        }
    }

    /// States `s0..`, domain `d0..`, agents as given.
    pub fn indexed(n_states: usize, n_domain: usize, agents: &[&str]) -> Self {
        ModelBuilder::new(
            (0..n_states).map(|s| format!("s{s}")).collect(),
            (0..n_domain).map(|d| format!("d{d}")).collect(),
            agents.iter().map(|a| AgentId::new(*a)).collect(),
        )
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn group(&mut self, name: &str, members: &[&str]) -> &mut Self {
        self.groups.insert(name.to_string(), members.iter().map(|m| AgentId::new(*m)).collect());
        self
    }

    pub fn function(&mut self, name: &str, arity: usize, table: BTreeMap<Vec<usize>, usize>) -> &mut Self {
        self.functions.insert(name.to_string(), FunctionTable { arity, table });
        self
    }

    /// Constant symbol interpreted as domain element `d`.
    pub fn constant(&mut self, name: &str, d: usize) -> &mut Self {
        self.function(name, 0, BTreeMap::from([(Vec::new(), d)]))
    }

    pub fn relation(&mut self, name: &str, arity: usize) -> &mut Self {
        let n = self.n_states();
        self.relations
            .entry(name.to_string())
            .or_insert_with(|| RelationTable { arity, per_state: vec![BTreeSet::new(); n] });
        self
    }

    pub fn fact(&mut self, name: &str, state: usize, args: Vec<usize>) -> &mut Self {
        let arity = args.len();
        self.relation(name, arity);
        self.relations.get_mut(name).expect("just inserted").per_state[state].insert(args);
        self
    }

    /// Nullary relation true exactly on `states`.
    pub fn prop_on(&mut self, name: &str, states: impl IntoIterator<Item = usize>) -> &mut Self {
        self.relation(name, 0);
        for s in states {
            self.fact(name, s, Vec::new());
        }
        self
    }

    pub fn edge(&mut self, agent: usize, from: usize, to: usize) -> &mut Self {
        self.access[agent][from].insert(to);
        self
    }

    pub fn access_set(&mut self, agent: usize, from: usize, to: StateSet) -> &mut Self {
        self.access[agent][from] = to;
        self
    }

    pub fn space(&mut self, agent: usize, state: usize, space: ProbSpace) -> &mut Self {
        self.prob[agent][state] = Some(space);
        self
    }

    /// Fills every missing space with the uniform measure on `𝒦_i(s)`, or
    /// the point mass on `s` when `𝒦_i(s)` is empty.
    pub fn default_spaces(&mut self) -> &mut Self {
        let n = self.n_states();
        for (i, row) in self.prob.iter_mut().enumerate() {
            for (s, slot) in row.iter_mut().enumerate() {
                if slot.is_none() {
                    let acc = &self.access[i][s];
                    *slot = Some(if acc.count_ones(..) == 0 { ProbSpace::point(n, s) } else { ProbSpace::uniform(acc) });
                }
            }
        }
        self
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let (n, nd) = (self.states.len(), self.domain.len());
        if n == 0 {
            out.push(Violation::new("states", "state set is empty"));
        }
        if nd == 0 {
            out.push(Violation::new("domain", "domain is empty"));
        }
        for (what, names) in [("states", &self.states), ("domain", &self.domain)] {
            let distinct: BTreeSet<_> = names.iter().collect();
            if distinct.len() != names.len() {
                out.push(Violation::new(what, "duplicate names"));
            }
        }
        let agents: BTreeSet<_> = self.agents.iter().collect();
        if agents.len() != self.agents.len() {
            out.push(Violation::new("agents", "duplicate names"));
        }
        if self.agents.is_empty() {
            out.push(Violation::new("agents", "agent set is empty"));
        }
        for (name, members) in &self.groups {
            let loc = format!("groups.{name}");
            if agents.contains(&AgentId::new(name.as_str())) {
                out.push(Violation::new(&loc, "group name clashes with an agent"));
            }
            let distinct: BTreeSet<_> = members.iter().collect();
            if members.is_empty() || distinct.len() != members.len() {
                out.push(Violation::new(&loc, "group must be nonempty and duplicate-free"));
            }
            for m in members.iter().filter(|m| !agents.contains(m)) {
                out.push(Violation::new(&loc, format!("unknown agent `{m}`")));
            }
        }
        for (name, f) in &self.functions {
            let loc = format!("functions.{name}");
            for (args, value) in &f.table {
                if args.len() != f.arity {
                    out.push(Violation::new(&loc, format!("row has {} arguments, arity is {}", args.len(), f.arity)));
                }
                if args.iter().chain([value]).any(|d| *d >= nd) {
                    out.push(Violation::new(&loc, "element outside the domain"));
                }
            }
            let expected = nd.checked_pow(f.arity as u32).unwrap_or(usize::MAX);
            if f.table.len() != expected {
                out.push(Violation::new(&loc, format!("table is not total: {} of {expected} rows", f.table.len())));
            }
        }
        for (name, rel) in &self.relations {
            let loc = format!("relations.{name}");
            for tuples in &rel.per_state {
                for t in tuples {
                    if t.len() != rel.arity {
                        out.push(Violation::new(&loc, format!("tuple of length {}, arity is {}", t.len(), rel.arity)));
                    }
                    if t.iter().any(|d| *d >= nd) {
                        out.push(Violation::new(&loc, "element outside the domain"));
                    }
                }
            }
        }
        for (i, row) in self.prob.iter().enumerate() {
            for (s, space) in row.iter().enumerate() {
                let problems = match space {
                    None => vec!["missing probability space".to_string()],
                    Some(sp) => sp.problems(n),
                };
                if !problems.is_empty() {
                    let loc = format!("prob.{}.{}", self.agents[i], self.states[s]);
                    out.extend(problems.into_iter().map(|m| Violation::new(&loc, m)));
                }
            }
        }
        out
    }

    pub fn build(&self) -> Result<Model, ModelError> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Ok(Model::assemble(
            self.states.clone(),
            self.domain.clone(),
            self.agents.clone(),
            self.groups.clone(),
            self.functions.clone(),
            self.relations.clone(),
            self.access.clone(),
            self.prob.iter().map(|row| row.iter().map(|sp| sp.clone().expect("checked")).collect()).collect(),
        ))
    }

    /// [`ModelBuilder::build`] without validation, for generators whose
    /// output is valid by construction.
    pub(crate) fn build_unchecked(self) -> Model {
        Model::assemble(
            self.states,
            self.domain,
            self.agents,
            self.groups,
            self.functions,
            self.relations,
            self.access,
            self.prob.into_iter().map(|row| row.into_iter().map(|sp| sp.expect("every space set")).collect()).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_uniform() -> Model {
        let mut b = ModelBuilder::indexed(2, 1, &["a"]);
        for s in 0..2 {
            b.access_set(0, s, full_set(2));
        }
        b.default_spaces();
        b.build().unwrap()
    }

    #[test]
    fn uniform_two_state_model_is_valid() {
        let m = two_state_uniform();
        assert_eq!(m.measure(0, 0, &state_set(2, [1])).unwrap(), Rational01::frac(1, 2));
    }

    #[test]
    fn unnormalized_weights_are_reported() {
        let mut b = ModelBuilder::indexed(1, 1, &["a"]);
        b.space(0, 0, ProbSpace::singletons(1, &[(0, Rational01::frac(3, 4))]));
        let v = b.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("measure not normalized"), "{v:?}");
    }

    #[test]
    fn tuple_outside_domain_is_reported() {
        let mut b = ModelBuilder::indexed(1, 1, &["a"]);
        b.default_spaces().fact("R", 0, vec![3]);
        assert!(b.violations().iter().any(|v| v.message.contains("outside the domain")));
    }

    #[test]
    fn measure_sums_atoms() {
        let space = ProbSpace::new(
            state_set(3, 0..3),
            vec![state_set(3, [0]), state_set(3, [1, 2])],
            vec![Rational01::frac(1, 3), Rational01::frac(2, 3)],
        );
        assert_eq!(space.measure(&state_set(3, 0..3)).unwrap(), Rational01::one());
        assert_eq!(space.measure(&state_set(3, [])).unwrap(), Rational01::zero());
        assert_eq!(space.measure(&state_set(3, [1, 2])).unwrap(), Rational01::frac(2, 3));
        assert_eq!(space.measure(&state_set(3, [1])), Err(NotMeasurable { atom: 1 }));
    }

    #[test]
    fn classification_examples() {
        let m = two_state_uniform();
        let flags = m.classify();
        assert!(flags.con && flags.obj && flags.sdp && flags.unif && flags.meas);

        // different atoms at an accessible state breaks SDP
        let mut b = ModelBuilder::indexed(2, 1, &["a"]);
        b.edge(0, 0, 1).edge(0, 1, 1);
        b.space(0, 0, ProbSpace::point(2, 1));
        b.space(0, 1, ProbSpace::uniform(&full_set(2)));
        let flags = b.build().unwrap().classify();
        assert!(!flags.sdp);
        assert!(!flags.con);
    }

    #[test]
    fn group_names_resolve_to_members() {
        let mut b = ModelBuilder::indexed(1, 1, &["a", "b"]);
        b.default_spaces().group("G", &["a", "b"]);
        let m = b.build().unwrap();
        assert_eq!(m.resolve_group(&Group::of(&["G"])).unwrap(), vec![0, 1]);
        assert_eq!(m.resolve_group(&Group::of(&["b"])).unwrap(), vec![1]);
        assert!(m.resolve_group(&Group::of(&["z"])).is_err());
    }
}
