//! Brute-force ground truth at desk scale.
//!
//! Exhaustive enumeration of small models, model search, seeded soundness
//! fuzzing, the non-compactness witnesses and the validity suites for the
//! derived theorems. Nothing here decides satisfiability: a search that
//! finds nothing reports [`crate::report::Verdict::NotFoundWithinBudget`].

mod demo;
mod enumerate;
mod fixpoint;
mod fuzz;
mod random;
mod suites;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rational::Rational01;
use crate::syntax::{AgentId, Formula, Term, FALSUM};

pub use demo::{chain_model, noncompactness_demo, threshold_model, MAX_DEMO_BOUND};
pub use enumerate::{count_models, enumerate_models, find_model, space_options, FindOutcome, ModelEnumerator};
pub use fixpoint::{fixed_point_check, FixpointStats};
pub use fuzz::{class_sanity, fuzz_class, fuzz_soundness, FuzzFailure, FuzzSummary, FUZZ_SCHEMAS};
pub use random::{class_model, random_formula, random_instance, random_model, random_proof, FuzzSignature, ModelClass};
pub use suites::{suite_instances, validity_suite, Family, SuiteInstance};

/// Default for [`SearchBudget::cap`].
pub const DEFAULT_CAP: u64 = 5_000_000;

/// Probability spaces tried by the enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpaceMode {
    /// The uniform measure on `𝒦_i(s)` (point mass on `s` if empty): no
    /// extra choices per state.
    #[default]
    Uniform,
    /// Every nonempty sample, atom partition and grid weighting summing to 1.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AtomMode {
    /// Powerset algebras only.
    #[default]
    Singletons,
    /// Every partition of the sample into atoms.
    Partitions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchBudget {
    pub max_states: usize,
    pub max_domain: usize,
    pub max_agents: usize,
    pub weight_grid: Vec<Rational01>,
    /// Relation symbols with arities; [`find_model`] adds the formula's own.
    pub relations: Vec<(String, usize)>,
    pub seed: u64,
    pub spaces: SpaceMode,
    pub atoms: AtomMode,
    /// Largest number of models an enumeration may visit.
    pub cap: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_states: 2,
            max_domain: 1,
            max_agents: 2,
            weight_grid: default_grid(),
            relations: vec![("p".to_string(), 0)],
            seed: 0,
            spaces: SpaceMode::Uniform,
            atoms: AtomMode::Singletons,
            cap: DEFAULT_CAP,
        }
    }
}

/// `{0, 1/4, 1/3, 1/2, 2/3, 3/4, 1}`
pub fn default_grid() -> Vec<Rational01> {
    [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)].iter().map(|&(n, d)| Rational01::frac(n, d)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("budget field `{0}` must be at least 1")]
    EmptyBudget(&'static str),
    #[error("weight grid cannot sum to exactly 1")]
    GridCannotNormalize,
    #[error("budget too large: {count} models exceed the cap of {cap}")]
    TooLarge { count: u128, cap: u64 },
    #[error("formula has free variables {0:?}; only sentences can be searched")]
    NotSentence(Vec<String>),
    #[error("formula needs {needed} agents, budget allows {allowed}")]
    TooManyAgents { needed: usize, allowed: usize },
    #[error("demo bound must be between 1 and {max}, got {m}")]
    DemoBound { m: usize, max: usize },
    #[error("evaluation failed: {0}")]
    Eval(String),
}

impl SearchBudget {
    pub fn validate(&self) -> Result<(), OracleError> {
        for (name, v) in [("max_states", self.max_states), ("max_domain", self.max_domain), ("max_agents", self.max_agents)] {
            if v == 0 {
                return Err(OracleError::EmptyBudget(name));
            }
        }
        if self.spaces == SpaceMode::Grid && !self.weight_grid.iter().any(Rational01::is_one) {
            // a singleton sample needs weight exactly 1
            return Err(OracleError::GridCannotNormalize);
        }
        Ok(())
    }
}

/// Symbols a formula uses, with arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub relations: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
    pub agents: BTreeSet<AgentId>,
}

impl Signature {
    pub fn of(f: &Formula) -> Self {
        let mut sig = Signature::default();
        sig.add(f);
        sig
    }

    pub fn add(&mut self, f: &Formula) {
        match f {
            Formula::Atom(r, args) => {
                if r != FALSUM {
                    self.relations.entry(r.clone()).or_insert(args.len());
                }
                args.iter().for_each(|t| self.add_term(t));
            }
            Formula::Know(i, _) | Formula::Prob(i, _, _) => {
                self.agents.insert(i.clone());
            }
            Formula::Everyone(g, _) | Formula::Common(g, _) | Formula::EveryoneProb(g, _, _) | Formula::CommonProb(g, _, _) => {
                self.agents.extend(g.members().iter().cloned());
            }
            _ => {}
        }
        f.children().for_each(|c| self.add(c));
    }

    fn add_term(&mut self, t: &Term) {
        if let Term::App(name, args) = t {
            self.functions.entry(name.clone()).or_insert(args.len());
            args.iter().for_each(|a| self.add_term(a));
        }
    }
}
