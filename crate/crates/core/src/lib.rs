//! First-order probabilistic epistemic logic with common knowledge.
//!
//! The crate parses formulas, evaluates them over finite Kripke structures
//! equipped with finitely additive probability spaces, checks Hilbert-style
//! proofs (including bounded certificates for the infinitary rules), and
//! provides brute-force oracles over small models.

pub mod axioms;
pub mod eval;
pub mod model;
pub mod oracle;
pub mod parser;
pub mod proof;
pub mod rational;
pub mod report;
pub mod syntax;

pub use eval::{satisfies, EvalError, Evaluator, Valuation};
pub use model::{ClassFlags, Model, ModelBuilder, ProbSpace, StateSet};
pub use parser::{parse_formula, print_formula};
pub use rational::Rational01;
pub use syntax::{AgentId, Formula, Group, Term};
