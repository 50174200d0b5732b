//! Finite Hilbert-style proofs and their checker.
//!
//! The infinitary rules take one premise per group member (`RE`, `RPE`,
//! checked exactly) or one per natural number (`RC`, `RPC`, `RA`). For the
//! latter a proof carries a [`Certificate`] listing premises up to a bound,
//! and a proof that uses one is reported as accepted *with bounded
//! certificates*, never plainly accepted.
//!
//! The shape `Φ_{k,θ,X}` of an infinitary step is read off its conclusion
//! given `k`; the premises must then match that shape exactly.

mod builder;
mod transform;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::axioms::{match_axiom, AxiomName, AxiomSet};
use crate::rational::Rational01;
use crate::syntax::{
    is_sentence, iterate_e, iterate_f, nested_implication, AgentId, Formula, NestedSpec, Var,
};

pub use builder::{everyone_equivalence_proof, fixed_point_proof, k_distribution_proof, rpc_premise, ProofBuilder};
pub use transform::{deduction_transform, strong_necessitation_transform, TransformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProofMode {
    #[default]
    Plain,
    /// Adds the CON axiom and drops probabilistic necessitation.
    Con,
}

impl ProofMode {
    pub fn axioms(&self) -> AxiomSet {
        match self {
            ProofMode::Plain => AxiomSet::plain(),
            ProofMode::Con => AxiomSet::with_con(),
        }
    }
}

/// Premises of an ω-rule up to a declared bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub bound: u32,
    /// index `m` -> step
    pub premises: BTreeMap<u32, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Justification {
    Axiom(AxiomName),
    Hyp(usize),
    Mp { minor: usize, major: usize },
    For { premise: usize, var: Var },
    Rk { premise: usize, agent: AgentId },
    Rp { premise: usize, agent: AgentId },
    Re { k: usize, premises: BTreeMap<AgentId, usize> },
    Rpe { k: usize, premises: BTreeMap<AgentId, usize> },
    Rc { k: usize, cert: Certificate },
    Rpc { k: usize, cert: Certificate },
    Ra { k: usize, cert: Certificate },
}

impl Justification {
    /// Steps this justification cites.
    pub fn premises(&self) -> Vec<usize> {
        match self {
            Justification::Axiom(_) | Justification::Hyp(_) => Vec::new(),
            Justification::Mp { minor, major } => vec![*minor, *major],
            Justification::For { premise, .. } | Justification::Rk { premise, .. } | Justification::Rp { premise, .. } => {
                vec![*premise]
            }
            Justification::Re { premises, .. } | Justification::Rpe { premises, .. } => premises.values().copied().collect(),
            Justification::Rc { cert, .. } | Justification::Rpc { cert, .. } | Justification::Ra { cert, .. } => {
                cert.premises.values().copied().collect()
            }
        }
    }

    pub fn rule_name(&self) -> &'static str {
        match self {
            Justification::Axiom(_) => "axiom",
            Justification::Hyp(_) => "hyp",
            Justification::Mp { .. } => "MP",
            Justification::For { .. } => "FOR",
            Justification::Rk { .. } => "RK",
            Justification::Rp { .. } => "RP",
            Justification::Re { .. } => "RE",
            Justification::Rpe { .. } => "RPE",
            Justification::Rc { .. } => "RC",
            Justification::Rpc { .. } => "RPC",
            Justification::Ra { .. } => "RA",
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Justification::Rc { cert, .. } | Justification::Rpc { cert, .. } | Justification::Ra { cert, .. } => Some(cert),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Proof {
    pub mode: ProofMode,
    pub hypotheses: Vec<Formula>,
    pub steps: Vec<Step>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    /// Per step: derived without hypotheses.
    pub fn theorem_flags(&self) -> Vec<bool> {
        let mut flags: Vec<bool> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let flag = match &step.just {
                Justification::Hyp(_) => false,
                Justification::Rk { .. } | Justification::Rp { .. } => true,
                j => j.premises().iter().all(|&p| flags.get(p).copied().unwrap_or(false)),
            };
            flags.push(flag);
        }
        flags
    }

    pub fn uses_certificates(&self) -> bool {
        self.steps.iter().any(|s| s.just.certificate().is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("step cites step {cited}, which does not precede it")]
    ForwardReference { cited: usize },
    #[error("formula is not an instance of {0}")]
    NotAnInstance(AxiomName),
    #[error("axiom {0} is not available in this mode")]
    AxiomDisabled(AxiomName),
    #[error("hypothesis #{0} does not exist")]
    NoSuchHypothesis(usize),
    #[error("hypothesis #{0} is not a sentence")]
    HypothesisNotSentence(usize),
    #[error("formula differs from hypothesis #{0}")]
    HypothesisMismatch(usize),
    #[error("major premise is not the implication from the minor premise to this step")]
    MpMismatch,
    #[error("formula is not the generalization of the premise over `{0}`")]
    ForMismatch(Var),
    #[error("premise of {rule} not a theorem")]
    PremiseNotTheorem { rule: &'static str },
    #[error("probabilistic necessitation is not available in CON mode")]
    RpDisabled,
    #[error("formula is not {0} applied to the premise")]
    NecessitationMismatch(&'static str),
    #[error("conclusion does not have the shape of a {k}-nested implication of {expected}")]
    ConclusionShape { k: usize, expected: &'static str },
    #[error("missing premise for group member `{0}`")]
    MissingMember(String),
    #[error("premise given for `{0}`, which is not a member of the group")]
    ExtraMember(String),
    #[error("premise for {index} does not match the rule's schema")]
    PremiseMismatch { index: String },
    #[error("certificate must list premises for {expected}, found {found}")]
    CertificateRange { expected: String, found: String },
    #[error("RA is stated for thresholds in (0,1]")]
    ZeroThreshold,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofVerdict {
    Accepted,
    /// Every step checks, but some ω-rule premises were only checked up to
    /// `bound` (the smallest bound used).
    AcceptedWithBoundedCertificates { bound: u32 },
    Rejected { step: usize, reason: StepError },
}

impl ProofVerdict {
    pub fn is_accepted(&self) -> bool {
        !matches!(self, ProofVerdict::Rejected { .. })
    }
}

impl fmt::Display for ProofVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofVerdict::Accepted => write!(f, "accepted"),
            ProofVerdict::AcceptedWithBoundedCertificates { bound } => {
                write!(f, "accepted-with-bounded-certificates (B={bound})")
            }
            ProofVerdict::Rejected { step, reason } => write!(f, "rejected at step {step}: {reason}"),
        }
    }
}

/// Checks every step in order and stops at the first failure.
pub fn check(proof: &Proof) -> ProofVerdict {
    let theorems = proof.theorem_flags();
    for (ix, step) in proof.steps.iter().enumerate() {
        if let Err(reason) = check_step(proof, &theorems, ix, step) {
            return ProofVerdict::Rejected { step: ix, reason };
        }
    }
    let bound = proof.steps.iter().filter_map(|s| s.just.certificate()).map(|c| c.bound).min();
    match bound {
        Some(bound) => ProofVerdict::AcceptedWithBoundedCertificates { bound },
        None => ProofVerdict::Accepted,
    }
}

fn check_step(proof: &Proof, theorems: &[bool], ix: usize, step: &Step) -> Result<(), StepError> {
    for cited in step.just.premises() {
        if cited >= ix {
            return Err(StepError::ForwardReference { cited });
        }
    }
    let at = |i: usize| &proof.steps[i].formula;
    let f = &step.formula;
    match &step.just {
        Justification::Axiom(name) => {
            let set = proof.mode.axioms();
            if !set.allows(*name) {
                return Err(StepError::AxiomDisabled(*name));
            }
            if !match_axiom(f, &set).iter().any(|inst| inst.name() == *name) {
                return Err(StepError::NotAnInstance(*name));
            }
        }
        Justification::Hyp(h) => {
            let hyp = proof.hypotheses.get(*h).ok_or(StepError::NoSuchHypothesis(*h))?;
            if !is_sentence(hyp) {
                return Err(StepError::HypothesisNotSentence(*h));
            }
            if hyp != f {
                return Err(StepError::HypothesisMismatch(*h));
            }
        }
        Justification::Mp { minor, major } => {
            if *at(*major) != Formula::implies(at(*minor).clone(), f.clone()) {
                return Err(StepError::MpMismatch);
            }
        }
        Justification::For { premise, var } => {
            if *f != Formula::forall(var.clone(), at(*premise).clone()) {
                return Err(StepError::ForMismatch(var.clone()));
            }
        }
        Justification::Rk { premise, agent } => {
            if !theorems[*premise] {
                return Err(StepError::PremiseNotTheorem { rule: "RK" });
            }
            if *f != Formula::know(agent.clone(), at(*premise).clone()) {
                return Err(StepError::NecessitationMismatch("K_i"));
            }
        }
        Justification::Rp { premise, agent } => {
            if proof.mode == ProofMode::Con {
                return Err(StepError::RpDisabled);
            }
            if !theorems[*premise] {
                return Err(StepError::PremiseNotTheorem { rule: "RP" });
            }
            if *f != Formula::prob(agent.clone(), Rational01::one(), at(*premise).clone()) {
                return Err(StepError::NecessitationMismatch("P_{i,>=1}"));
            }
        }
        Justification::Re { k, premises } | Justification::Rpe { k, premises } => {
            let prob = matches!(step.just, Justification::Rpe { .. });
            let (spec, tau) = NestedSpec::infer(*k, f).ok_or(StepError::ConclusionShape {
                k: *k,
                expected: if prob { "E_G^r φ" } else { "E_G φ" },
            })?;
            let (group, r, phi) = match (tau, prob) {
                (Formula::Everyone(g, phi), false) => (g, None, phi),
                (Formula::EveryoneProb(g, r, phi), true) => (g, Some(r), phi),
                _ => {
                    return Err(StepError::ConclusionShape { k: *k, expected: if prob { "E_G^r φ" } else { "E_G φ" } })
                }
            };
            for member in group.members() {
                let p = premises.get(member).ok_or_else(|| StepError::MissingMember(member.to_string()))?;
                let body = match r {
                    None => Formula::know(member.clone(), (**phi).clone()),
                    Some(r) => Formula::know_prob(member.clone(), r.clone(), (**phi).clone()),
                };
                if *at(*p) != nested_implication(&spec, body).expect("inferred spec is well formed") {
                    return Err(StepError::PremiseMismatch { index: format!("member `{member}`") });
                }
            }
            if let Some(extra) = premises.keys().find(|a| !group.contains(a)) {
                return Err(StepError::ExtraMember(extra.to_string()));
            }
        }
        Justification::Rc { k, cert } => {
            let (spec, tau) = NestedSpec::infer(*k, f).ok_or(StepError::ConclusionShape { k: *k, expected: "C_G φ" })?;
            let Formula::Common(group, phi) = tau else {
                return Err(StepError::ConclusionShape { k: *k, expected: "C_G φ" });
            };
            check_range(cert, 1, false)?;
            for (&m, &p) in &cert.premises {
                let body = iterate_e(group, m, (**phi).clone()).expect("m >= 1");
                if *at(p) != nested_implication(&spec, body).expect("inferred spec is well formed") {
                    return Err(StepError::PremiseMismatch { index: format!("m = {m}") });
                }
            }
        }
        Justification::Rpc { k, cert } => {
            let (spec, tau) =
                NestedSpec::infer(*k, f).ok_or(StepError::ConclusionShape { k: *k, expected: "C_G^r φ" })?;
            let Formula::CommonProb(group, r, phi) = tau else {
                return Err(StepError::ConclusionShape { k: *k, expected: "C_G^r φ" });
            };
            check_range(cert, 1, true)?;
            for (&m, &p) in &cert.premises {
                let body = iterate_f(group, r, m, phi);
                if *at(p) != nested_implication(&spec, body).expect("inferred spec is well formed") {
                    return Err(StepError::PremiseMismatch { index: format!("m = {m}") });
                }
            }
        }
        Justification::Ra { k, cert } => {
            let (spec, tau) =
                NestedSpec::infer(*k, f).ok_or(StepError::ConclusionShape { k: *k, expected: "P_{i,>=r} φ" })?;
            let Formula::Prob(agent, r, phi) = tau else {
                return Err(StepError::ConclusionShape { k: *k, expected: "P_{i,>=r} φ" });
            };
            let start = r.ceil_reciprocal().ok_or(StepError::ZeroThreshold)? as u32;
            check_range(cert, start, false)?;
            for (&m, &p) in &cert.premises {
                let lower = r.minus_reciprocal(m as u64).expect("m >= 1/r keeps r - 1/m >= 0");
                let body = Formula::prob(agent.clone(), lower, (**phi).clone());
                if *at(p) != nested_implication(&spec, body).expect("inferred spec is well formed") {
                    return Err(StepError::PremiseMismatch { index: format!("m = {m}") });
                }
            }
        }
    }
    Ok(())
}

/// Certificates list exactly the indices `start..=bound`; with
/// `zero_optional`, index 0 may additionally appear.
fn check_range(cert: &Certificate, start: u32, zero_optional: bool) -> Result<(), StepError> {
    let mut keys: Vec<u32> = cert.premises.keys().copied().collect();
    if zero_optional && keys.first() == Some(&0) && start > 0 {
        keys.remove(0);
    }
    let expected: Vec<u32> = (start..=cert.bound).collect();
    if cert.bound < start.max(1) || keys != expected {
        return Err(StepError::CertificateRange {
            expected: format!("m = {start}..={}", cert.bound.max(start)),
            found: format!("{keys:?}"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn step(f: &str, just: Justification) -> Step {
        Step { formula: p(f), just }
    }

    #[test]
    fn necessitation_of_a_tautology() {
        let proof = Proof {
            steps: vec![
                step("phi -> (psi -> phi)", Justification::Axiom(AxiomName::Prop)),
                step("K[i] (phi -> (psi -> phi))", Justification::Rk { premise: 0, agent: "i".into() }),
            ],
            ..Proof::default()
        };
        assert_eq!(check(&proof), ProofVerdict::Accepted);
    }

    #[test]
    fn rk_needs_a_theorem() {
        let proof = Proof {
            hypotheses: vec![p("phi")],
            steps: vec![
                step("phi", Justification::Hyp(0)),
                step("K[i] phi", Justification::Rk { premise: 0, agent: "i".into() }),
            ],
            ..Proof::default()
        };
        let verdict = check(&proof);
        assert!(matches!(verdict, ProofVerdict::Rejected { step: 1, reason: StepError::PremiseNotTheorem { .. } }));
        assert!(verdict.to_string().contains("premise of RK not a theorem"));
    }

    #[test]
    fn everyone_knows_from_each_member() {
        let proof = Proof {
            hypotheses: vec![p("true -> K[a] phi"), p("true -> K[b] phi")],
            steps: vec![
                step("true -> K[a] phi", Justification::Hyp(0)),
                step("true -> K[b] phi", Justification::Hyp(1)),
                step(
                    "true -> E{a,b} phi",
                    Justification::Re { k: 0, premises: [("a".into(), 0), ("b".into(), 1)].into_iter().collect() },
                ),
            ],
            ..Proof::default()
        };
        assert_eq!(check(&proof), ProofVerdict::Accepted);

        let mut missing = proof.clone();
        missing.steps[2].just = Justification::Re { k: 0, premises: [("a".into(), 0)].into_iter().collect() };
        assert!(matches!(check(&missing), ProofVerdict::Rejected { reason: StepError::MissingMember(_), .. }));
    }

    #[test]
    fn forward_references_are_rejected() {
        let proof = Proof {
            steps: vec![
                step("K[i] (p | !p)", Justification::Rk { premise: 1, agent: "i".into() }),
                step("p | !p", Justification::Axiom(AxiomName::Prop)),
            ],
            ..Proof::default()
        };
        assert!(matches!(check(&proof), ProofVerdict::Rejected { step: 0, reason: StepError::ForwardReference { .. } }));
    }

    #[test]
    fn con_mode_switches_rules() {
        let rp = Proof {
            mode: ProofMode::Con,
            steps: vec![
                step("p | !p", Justification::Axiom(AxiomName::Prop)),
                step("P[i]>=1 (p | !p)", Justification::Rp { premise: 0, agent: "i".into() }),
            ],
            ..Proof::default()
        };
        assert!(matches!(check(&rp), ProofVerdict::Rejected { reason: StepError::RpDisabled, .. }));
        let plain = Proof { mode: ProofMode::Plain, ..rp };
        assert_eq!(check(&plain), ProofVerdict::Accepted);

        let con = Proof {
            mode: ProofMode::Con,
            steps: vec![step("K[i] p -> P[i]>=1 p", Justification::Axiom(AxiomName::CON))],
            ..Proof::default()
        };
        assert_eq!(check(&con), ProofVerdict::Accepted);
        let not_con = Proof { mode: ProofMode::Plain, ..con };
        assert!(matches!(check(&not_con), ProofVerdict::Rejected { reason: StepError::AxiomDisabled(_), .. }));
    }

    #[test]
    fn archimedean_certificates_start_at_the_reciprocal() {
        // hypotheses P_{i,>=1/2 - 1/m} p for m = 2..=3; conclusion P_{i,>=1/2} p
        let hyps = vec![p("true -> P[i]>=0 p"), p("true -> P[i]>=1/6 p")];
        let mut proof = Proof {
            hypotheses: hyps.clone(),
            steps: vec![
                Step { formula: hyps[0].clone(), just: Justification::Hyp(0) },
                Step { formula: hyps[1].clone(), just: Justification::Hyp(1) },
                step(
                    "true -> P[i]>=1/2 p",
                    Justification::Ra {
                        k: 0,
                        cert: Certificate { bound: 3, premises: [(2, 0), (3, 1)].into_iter().collect() },
                    },
                ),
            ],
            ..Proof::default()
        };
        assert_eq!(check(&proof), ProofVerdict::AcceptedWithBoundedCertificates { bound: 3 });
        proof.steps[2].just = Justification::Ra {
            k: 0,
            cert: Certificate { bound: 3, premises: [(1, 0), (3, 1)].into_iter().collect() },
        };
        assert!(matches!(check(&proof), ProofVerdict::Rejected { reason: StepError::CertificateRange { .. }, .. }));
    }
}
