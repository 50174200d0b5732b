//! Proof transformations: the deduction theorem and strong necessitation.
//!
//! Both take a checked proof and produce a new one, step by step. Steps of
//! the input that do not depend on the transformed hypotheses are copied
//! unchanged.

use thiserror::Error;

use crate::axioms::AxiomParams;
use crate::syntax::{is_sentence, AgentId, Formula, NestedSpec};

use super::{check, Certificate, Justification, Proof, ProofBuilder, ProofVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("the proof has no steps")]
    EmptyProof,
    #[error("hypothesis #{0} does not exist")]
    NoSuchHypothesis(usize),
    #[error("hypothesis #{0} is not a sentence")]
    NotSentence(usize),
    #[error("input proof does not check: {0}")]
    Rejected(String),
}

fn checked(proof: &Proof) -> Result<(), TransformError> {
    if proof.steps.is_empty() {
        return Err(TransformError::EmptyProof);
    }
    match check(proof) {
        ProofVerdict::Rejected { .. } => Err(TransformError::Rejected(check(proof).to_string())),
        _ => Ok(()),
    }
}

/// Rebuilds an infinitary step whose premises have been rewritten.
///
/// `premise` maps each old premise index to the new step that proves the
/// same premise under `spec`; the new conclusion is `Φ_spec(τ)`.
fn reapply(b: &mut ProofBuilder, just: &Justification, spec: &NestedSpec, premise: &dyn Fn(usize) -> usize, tau: &Formula) -> usize {
    use Justification as J;
    let cert = |c: &Certificate| Certificate { bound: c.bound, premises: c.premises.iter().map(|(m, p)| (*m, premise(*p))).collect() };
    let just = match just {
        J::Re { premises, .. } => J::Re { k: spec.k(), premises: premises.iter().map(|(a, p)| (a.clone(), premise(*p))).collect() },
        J::Rpe { premises, .. } => J::Rpe { k: spec.k(), premises: premises.iter().map(|(a, p)| (a.clone(), premise(*p))).collect() },
        J::Rc { cert: c, .. } => J::Rc { k: spec.k(), cert: cert(c) },
        J::Rpc { cert: c, .. } => J::Rpc { k: spec.k(), cert: cert(c) },
        J::Ra { cert: c, .. } => J::Ra { k: spec.k(), cert: cert(c) },
        other => unreachable!("{} is not an infinitary rule", other.rule_name()),
    };
    let f = crate::syntax::nested_implication(spec, tau.clone()).expect("well-formed spec");
    b.push(f, just)
}

fn infinitary_k(just: &Justification) -> Option<usize> {
    match just {
        Justification::Re { k, .. }
        | Justification::Rpe { k, .. }
        | Justification::Rc { k, .. }
        | Justification::Rpc { k, .. }
        | Justification::Ra { k, .. } => Some(*k),
        _ => None,
    }
}

/// From a proof of `ψ` using hypothesis `#hyp = φ` (a sentence), builds a
/// proof of `φ -> ψ` from the remaining hypotheses. Repeated copies of `φ`
/// in the hypothesis list are discharged together.
pub fn deduction_transform(proof: &Proof, hyp: usize) -> Result<Proof, TransformError> {
    let phi = proof.hypotheses.get(hyp).ok_or(TransformError::NoSuchHypothesis(hyp))?.clone();
    if !is_sentence(&phi) {
        return Err(TransformError::NotSentence(hyp));
    }
    checked(proof)?;
    let rest: Vec<Formula> = proof.hypotheses.iter().filter(|h| **h != phi).cloned().collect();
    let mut b = ProofBuilder::with_hypotheses(proof.mode, rest);
    let imp = Formula::implies;

    let n = proof.steps.len();
    let mut dependent = vec![false; n];
    let mut copy = vec![usize::MAX; n];
    let mut d: Vec<Option<usize>> = vec![None; n];

    for (j, step) in proof.steps.iter().enumerate() {
        dependent[j] = match &step.just {
            Justification::Hyp(h) => proof.hypotheses[*h] == phi,
            just => just.premises().iter().any(|&p| dependent[p]),
        };
        if !dependent[j] {
            copy[j] = match &step.just {
                Justification::Hyp(_) => b.hyp(step.formula.clone()),
                _ => b.push_remapped(step, &copy),
            };
            continue;
        }
        let chi = &step.formula;
        let ensure = |b: &mut ProofBuilder, d: &mut Vec<Option<usize>>, p: usize| -> usize {
            if let Some(ix) = d[p] {
                return ix;
            }
            let ix = b.by_taut(copy[p], imp(phi.clone(), proof.steps[p].formula.clone()));
            d[p] = Some(ix);
            ix
        };
        let out = match &step.just {
            Justification::Hyp(_) => b.taut(imp(phi.clone(), phi.clone())),
            Justification::Mp { minor, major } => {
                let a = &proof.steps[*minor].formula;
                let dm = ensure(&mut b, &mut d, *minor);
                let dj = ensure(&mut b, &mut d, *major);
                let t = b.taut(imp(
                    imp(phi.clone(), a.clone()),
                    imp(imp(phi.clone(), imp(a.clone(), chi.clone())), imp(phi.clone(), chi.clone())),
                ));
                let partial = b.mp(dm, t);
                b.mp(dj, partial)
            }
            Justification::For { premise, var } => {
                let dp = ensure(&mut b, &mut d, *premise);
                let gen = b.generalize(dp, var);
                let body = proof.steps[*premise].formula.clone();
                let fo1 = b
                    .axiom(&AxiomParams::FO1 { x: var.clone(), phi: phi.clone(), psi: body })
                    .expect("a sentence has no free variables");
                b.mp(gen, fo1)
            }
            Justification::Axiom(_) | Justification::Rk { .. } | Justification::Rp { .. } => {
                unreachable!("axioms and necessitation steps never depend on a hypothesis")
            }
            just => {
                let k = infinitary_k(just).expect("remaining rules are infinitary");
                let (spec, tau) = NestedSpec::infer(k, chi).expect("checked step");
                let spec2 = spec.strengthen_outer(&phi);
                let theta = spec.thetas.last().expect("nonempty").clone();
                let mut moved = std::collections::BTreeMap::new();
                for p in just.premises() {
                    let dp = ensure(&mut b, &mut d, p);
                    // φ -> (θ_k -> Y)  ==>  (φ ∧ θ_k) -> Y
                    let (_, y) = proof.steps[p].formula.as_implies().expect("nested implication");
                    let target = imp(Formula::and(phi.clone(), theta.clone()), y.clone());
                    moved.insert(p, b.by_taut(dp, target));
                }
                let applied = reapply(&mut b, just, &spec2, &|p| moved[&p], tau);
                b.by_taut(applied, imp(phi.clone(), chi.clone()))
            }
        };
        d[j] = Some(out);
    }

    let last = n - 1;
    if !dependent[last] && d[last].is_none() {
        b.by_taut(copy[last], imp(phi.clone(), proof.steps[last].formula.clone()));
    } else if let Some(ix) = d[last] {
        if ix + 1 != b.len() {
            // the final step was derived earlier and reused; restate it last
            let f = b.formula(ix).clone();
            b.by_taut(ix, f);
        }
    }
    Ok(b.finish())
}

/// From a proof of `ψ` from `Γ`, builds a proof of `K_i ψ` from `K_i Γ`.
pub fn strong_necessitation_transform(proof: &Proof, agent: &AgentId) -> Result<Proof, TransformError> {
    checked(proof)?;
    let hyps: Vec<Formula> = proof.hypotheses.iter().map(|h| Formula::know(agent.clone(), h.clone())).collect();
    let mut b = ProofBuilder::with_hypotheses(proof.mode, hyps);
    let k = |f: Formula| Formula::know(agent.clone(), f);
    let imp = Formula::implies;
    let theorems = proof.theorem_flags();

    let n = proof.steps.len();
    let mut copy = vec![usize::MAX; n];
    let mut nk = vec![usize::MAX; n];
    for (j, step) in proof.steps.iter().enumerate() {
        let chi = &step.formula;
        if theorems[j] {
            copy[j] = b.push_remapped(step, &copy);
            nk[j] = b.rk(copy[j], agent);
            continue;
        }
        nk[j] = match &step.just {
            Justification::Hyp(_) => b.hyp(k(chi.clone())),
            Justification::Mp { minor, major } => {
                let a = proof.steps[*minor].formula.clone();
                let both = b.and_intro(nk[*minor], nk[*major]);
                let ak = b
                    .axiom(&AxiomParams::AK { agent: agent.clone(), phi: a, psi: chi.clone() })
                    .expect("AK has no side conditions");
                b.mp(both, ak)
            }
            Justification::For { premise, var } => {
                let gen = b.generalize(nk[*premise], var);
                let body = proof.steps[*premise].formula.clone();
                let fo3 = b
                    .axiom(&AxiomParams::FO3 { x: var.clone(), agent: agent.clone(), phi: body })
                    .expect("FO3 has no side conditions");
                b.mp(gen, fo3)
            }
            Justification::Axiom(_) | Justification::Rk { .. } | Justification::Rp { .. } => {
                unreachable!("axioms and necessitation steps are theorems")
            }
            just => {
                let kk = infinitary_k(just).expect("remaining rules are infinitary");
                let (spec, tau) = NestedSpec::infer(kk, chi).expect("checked step");
                let spec2 = spec.extend_know(agent);
                let mut moved = std::collections::BTreeMap::new();
                for p in just.premises() {
                    // K_i Φ  ==>  ⊤ -> K_i Φ
                    let f = k(proof.steps[p].formula.clone());
                    moved.insert(p, b.by_taut(nk[p], imp(Formula::top(), f)));
                }
                let applied = reapply(&mut b, just, &spec2, &|p| moved[&p], tau);
                b.by_taut(applied, k(chi.clone()))
            }
        };
    }
    let last = nk[n - 1];
    if last + 1 != b.len() {
        let f = b.formula(last).clone();
        b.by_taut(last, f);
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::AxiomName;
    use crate::proof::Step;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn modus_ponens_proof() -> Proof {
        Proof {
            hypotheses: vec![p("q"), p("q -> r")],
            steps: vec![
                Step { formula: p("q"), just: Justification::Hyp(0) },
                Step { formula: p("q -> r"), just: Justification::Hyp(1) },
                Step { formula: p("r"), just: Justification::Mp { minor: 0, major: 1 } },
            ],
            ..Proof::default()
        }
    }

    #[test]
    fn deduction_discharges_a_hypothesis() {
        let out = deduction_transform(&modus_ponens_proof(), 0).unwrap();
        assert_eq!(check(&out), ProofVerdict::Accepted);
        assert_eq!(out.hypotheses, vec![p("q -> r")]);
        assert_eq!(out.conclusion(), Some(&p("q -> r")));
    }

    #[test]
    fn strong_necessitation_lifts_hypotheses() {
        let out = strong_necessitation_transform(&modus_ponens_proof(), &"i".into()).unwrap();
        assert_eq!(check(&out), ProofVerdict::Accepted);
        assert_eq!(out.hypotheses, vec![p("K[i] q"), p("K[i] (q -> r)")]);
        assert_eq!(out.conclusion(), Some(&p("K[i] r")));
    }

    #[test]
    fn deduction_through_generalization() {
        let proof = Proof {
            hypotheses: vec![p("q")],
            steps: vec![
                Step { formula: p("q"), just: Justification::Hyp(0) },
                Step { formula: p("q -> (R(x) -> q)"), just: Justification::Axiom(AxiomName::Prop) },
                Step { formula: p("R(x) -> q"), just: Justification::Mp { minor: 0, major: 1 } },
                Step { formula: p("forall x (R(x) -> q)"), just: Justification::For { premise: 2, var: "x".into() } },
            ],
            ..Proof::default()
        };
        assert_eq!(check(&proof), ProofVerdict::Accepted);
        let out = deduction_transform(&proof, 0).unwrap();
        assert_eq!(check(&out), ProofVerdict::Accepted);
        assert_eq!(out.conclusion(), Some(&p("q -> forall x (R(x) -> q)")));
        let kout = strong_necessitation_transform(&proof, &"a".into()).unwrap();
        assert_eq!(check(&kout), ProofVerdict::Accepted);
        assert_eq!(kout.conclusion(), Some(&p("K[a] forall x (R(x) -> q)")));
    }

    #[test]
    fn transforms_through_everyone_rule() {
        let proof = Proof {
            hypotheses: vec![p("K[a] q"), p("K[b] q")],
            steps: vec![
                Step { formula: p("K[a] q"), just: Justification::Hyp(0) },
                Step { formula: p("K[a] q -> (true -> K[a] q)"), just: Justification::Axiom(AxiomName::Prop) },
                Step { formula: p("true -> K[a] q"), just: Justification::Mp { minor: 0, major: 1 } },
                Step { formula: p("K[b] q"), just: Justification::Hyp(1) },
                Step { formula: p("K[b] q -> (true -> K[b] q)"), just: Justification::Axiom(AxiomName::Prop) },
                Step { formula: p("true -> K[b] q"), just: Justification::Mp { minor: 3, major: 4 } },
                Step {
                    formula: p("true -> E{a,b} q"),
                    just: Justification::Re { k: 0, premises: [("a".into(), 2), ("b".into(), 5)].into_iter().collect() },
                },
            ],
            ..Proof::default()
        };
        assert_eq!(check(&proof), ProofVerdict::Accepted);
        let out = deduction_transform(&proof, 0).unwrap();
        assert_eq!(check(&out), ProofVerdict::Accepted);
        assert_eq!(out.conclusion(), Some(&p("K[a] q -> (true -> E{a,b} q)")));
        let kout = strong_necessitation_transform(&proof, &"c".into()).unwrap();
        assert_eq!(check(&kout), ProofVerdict::Accepted);
        assert_eq!(kout.conclusion(), Some(&p("K[c] (true -> E{a,b} q)")));
    }

    #[test]
    fn rejects_bad_input() {
        let mut bad = modus_ponens_proof();
        bad.steps[2].formula = p("s");
        assert!(matches!(deduction_transform(&bad, 0), Err(TransformError::Rejected(_))));
        assert_eq!(deduction_transform(&modus_ponens_proof(), 5), Err(TransformError::NoSuchHypothesis(5)));
    }
}
