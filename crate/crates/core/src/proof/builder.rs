use std::collections::{BTreeMap, HashMap};

use crate::axioms::{instantiate, AxiomError, AxiomParams};
use crate::rational::Rational01;
use crate::syntax::{iterate_e, iterate_f, nested_implication, AgentId, Formula, Group, NestedSpec};

use super::{AxiomName, Certificate, Justification, Proof, ProofMode, Step};

/// Appends steps to a proof, computing each conclusion from its premises.
///
/// Identical formulas with identical justifications are reused rather than
/// re-derived. The builder does not check anything; run
/// [`super::check`] on the result.
#[derive(Debug, Clone, Default)]
pub struct ProofBuilder {
    proof: Proof,
    seen: HashMap<Step, usize>,
}

impl ProofBuilder {
    pub fn new(mode: ProofMode) -> Self {
        ProofBuilder { proof: Proof { mode, ..Proof::default() }, seen: HashMap::new() }
    }

    pub fn with_hypotheses(mode: ProofMode, hypotheses: Vec<Formula>) -> Self {
        let mut b = ProofBuilder::new(mode);
        b.proof.hypotheses = hypotheses;
        b
    }

    pub fn finish(self) -> Proof {
        self.proof
    }

    pub fn proof(&self) -> &Proof {
        &self.proof
    }

    pub fn formula(&self, step: usize) -> &Formula {
        &self.proof.steps[step].formula
    }

    pub fn len(&self) -> usize {
        self.proof.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proof.steps.is_empty()
    }

    pub fn push(&mut self, formula: Formula, just: Justification) -> usize {
        let step = Step { formula, just };
        if let Some(&ix) = self.seen.get(&step) {
            return ix;
        }
        let ix = self.proof.steps.len();
        self.seen.insert(step.clone(), ix);
        self.proof.steps.push(step);
        ix
    }

    /// Cites hypothesis `f`, adding it to the hypothesis list if needed.
    pub fn hyp(&mut self, f: Formula) -> usize {
        let h = match self.proof.hypotheses.iter().position(|h| *h == f) {
            Some(h) => h,
            None => {
                self.proof.hypotheses.push(f.clone());
                self.proof.hypotheses.len() - 1
            }
        };
        self.push(f, Justification::Hyp(h))
    }

    pub fn axiom(&mut self, params: &AxiomParams) -> Result<usize, AxiomError> {
        let f = instantiate(params)?;
        Ok(self.push(f, Justification::Axiom(params.name())))
    }

    /// A `Prop` step; the caller vouches that `f` is a tautology.
    pub fn taut(&mut self, f: Formula) -> usize {
        self.push(f, Justification::Axiom(AxiomName::Prop))
    }

    /// From `minor: A` and `major: A -> B`, derives `B`.
    pub fn mp(&mut self, minor: usize, major: usize) -> usize {
        let (a, b) = self.formula(major).as_implies().expect("major premise is an implication");
        debug_assert_eq!(a, self.formula(minor));
        let b = b.clone();
        self.push(b, Justification::Mp { minor, major })
    }

    /// From `step: A`, derives `B` through the tautology `A -> B`.
    pub fn by_taut(&mut self, step: usize, b: Formula) -> usize {
        let a = self.formula(step).clone();
        let t = self.taut(Formula::implies(a, b));
        self.mp(step, t)
    }

    /// From `A` and `B`, derives `A ∧ B`.
    pub fn and_intro(&mut self, a: usize, b: usize) -> usize {
        let (fa, fb) = (self.formula(a).clone(), self.formula(b).clone());
        let t = self.taut(Formula::implies(fa.clone(), Formula::implies(fb.clone(), Formula::and(fa, fb))));
        let partial = self.mp(a, t);
        self.mp(b, partial)
    }

    /// From `A -> B` and `B -> C`, derives `A -> C`.
    pub fn chain(&mut self, ab: usize, bc: usize) -> usize {
        let (a, b) = self.formula(ab).as_implies().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let c = self.formula(bc).as_implies().map(|(_, c)| c.clone()).expect("implication");
        let imp = Formula::implies;
        let t = self.taut(imp(
            imp(a.clone(), b.clone()),
            imp(imp(b, c.clone()), imp(a, c)),
        ));
        let partial = self.mp(ab, t);
        self.mp(bc, partial)
    }

    pub fn generalize(&mut self, premise: usize, var: &str) -> usize {
        let f = Formula::forall(var, self.formula(premise).clone());
        self.push(f, Justification::For { premise, var: var.to_string() })
    }

    pub fn rk(&mut self, premise: usize, agent: &AgentId) -> usize {
        let f = Formula::know(agent.clone(), self.formula(premise).clone());
        self.push(f, Justification::Rk { premise, agent: agent.clone() })
    }

    pub fn rp(&mut self, premise: usize, agent: &AgentId) -> usize {
        let f = Formula::prob(agent.clone(), Rational01::one(), self.formula(premise).clone());
        self.push(f, Justification::Rp { premise, agent: agent.clone() })
    }

    /// From `A -> B`, derives `K_i A -> K_i B` (RK then AK).
    pub fn know_mono(&mut self, imp_step: usize, agent: &AgentId) -> usize {
        let (a, b) = self.formula(imp_step).as_implies().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let k_imp = self.rk(imp_step, agent);
        let ak = self
            .axiom(&AxiomParams::AK { agent: agent.clone(), phi: a.clone(), psi: b.clone() })
            .expect("AK has no side conditions");
        // (K a ∧ K(a->b)) -> K b  ==>  K(a->b) -> (K a -> K b)
        let (ka, kab, kb) = (
            Formula::know(agent.clone(), a.clone()),
            Formula::know(agent.clone(), Formula::implies(a, b.clone())),
            Formula::know(agent.clone(), b),
        );
        let imp = Formula::implies;
        let swap = self.by_taut(ak, imp(kab, imp(ka, kb)));
        self.mp(k_imp, swap)
    }

    /// `Φ_spec(E_G φ)` from one premise per member.
    pub fn re(&mut self, spec: &NestedSpec, group: &Group, phi: &Formula, premises: BTreeMap<AgentId, usize>) -> usize {
        let f = nested_implication(spec, Formula::everyone(group.clone(), phi.clone())).expect("well-formed spec");
        self.push(f, Justification::Re { k: spec.k(), premises })
    }

    pub fn rpe(
        &mut self,
        spec: &NestedSpec,
        group: &Group,
        r: &Rational01,
        phi: &Formula,
        premises: BTreeMap<AgentId, usize>,
    ) -> usize {
        let body = Formula::everyone_prob(group.clone(), r.clone(), phi.clone());
        let f = nested_implication(spec, body).expect("well-formed spec");
        self.push(f, Justification::Rpe { k: spec.k(), premises })
    }

    pub fn rc(&mut self, spec: &NestedSpec, group: &Group, phi: &Formula, cert: Certificate) -> usize {
        let f = nested_implication(spec, Formula::common(group.clone(), phi.clone())).expect("well-formed spec");
        self.push(f, Justification::Rc { k: spec.k(), cert })
    }

    pub fn rpc(&mut self, spec: &NestedSpec, group: &Group, r: &Rational01, phi: &Formula, cert: Certificate) -> usize {
        let body = Formula::common_prob(group.clone(), r.clone(), phi.clone());
        let f = nested_implication(spec, body).expect("well-formed spec");
        self.push(f, Justification::Rpc { k: spec.k(), cert })
    }

    pub fn ra(&mut self, spec: &NestedSpec, agent: &AgentId, r: &Rational01, phi: &Formula, cert: Certificate) -> usize {
        let body = Formula::prob(agent.clone(), r.clone(), phi.clone());
        let f = nested_implication(spec, body).expect("well-formed spec");
        self.push(f, Justification::Ra { k: spec.k(), cert })
    }

    /// Rebuilds step `just` of some other proof with premises remapped.
    pub(crate) fn push_remapped(&mut self, step: &Step, map: &[usize]) -> usize {
        use Justification as J;
        let cert = |c: &Certificate| Certificate {
            bound: c.bound,
            premises: c.premises.iter().map(|(m, p)| (*m, map[*p])).collect(),
        };
        let members = |ps: &BTreeMap<AgentId, usize>| ps.iter().map(|(a, p)| (a.clone(), map[*p])).collect();
        let just = match &step.just {
            J::Axiom(n) => J::Axiom(*n),
            J::Hyp(_) => panic!("hypotheses are remapped by the caller"),
            J::Mp { minor, major } => J::Mp { minor: map[*minor], major: map[*major] },
            J::For { premise, var } => J::For { premise: map[*premise], var: var.clone() },
            J::Rk { premise, agent } => J::Rk { premise: map[*premise], agent: agent.clone() },
            J::Rp { premise, agent } => J::Rp { premise: map[*premise], agent: agent.clone() },
            J::Re { k, premises } => J::Re { k: *k, premises: members(premises) },
            J::Rpe { k, premises } => J::Rpe { k: *k, premises: members(premises) },
            J::Rc { k, cert: c } => J::Rc { k: *k, cert: cert(c) },
            J::Rpc { k, cert: c } => J::Rpc { k: *k, cert: cert(c) },
            J::Ra { k, cert: c } => J::Ra { k: *k, cert: cert(c) },
        };
        self.push(step.formula.clone(), just)
    }
}

/// `K_i(φ -> ψ) -> (K_i φ -> K_i ψ)`, directly from AK.
pub fn k_distribution_proof(agent: &AgentId, phi: &Formula, psi: &Formula) -> Proof {
    let mut b = ProofBuilder::new(ProofMode::Plain);
    let ak = b
        .axiom(&AxiomParams::AK { agent: agent.clone(), phi: phi.clone(), psi: psi.clone() })
        .expect("AK has no side conditions");
    let k = |f: Formula| Formula::know(agent.clone(), f);
    let imp = Formula::implies;
    b.by_taut(ak, imp(k(imp(phi.clone(), psi.clone())), imp(k(phi.clone()), k(psi.clone()))));
    b.finish()
}

/// `E_G φ <-> K_a φ ∧ K_b φ ∧ ...` for the (syntactic) members of `group`.
pub fn everyone_equivalence_proof(group: &Group, phi: &Formula) -> Proof {
    let mut b = ProofBuilder::new(ProofMode::Plain);
    let members = group.members();
    let ks: Vec<Formula> = members.iter().map(|a| Formula::know(a.clone(), phi.clone())).collect();
    let conj = ks[1..].iter().cloned().fold(ks[0].clone(), Formula::and);
    let e = Formula::everyone(group.clone(), phi.clone());
    let imp = Formula::implies;

    // E_G φ -> ⋀ K_i φ: one AE per member, then propositional glue
    let mut forward: Option<usize> = None;
    let mut acc = Formula::top();
    for a in members {
        let ae = b
            .axiom(&AxiomParams::AE { group: group.clone(), agent: a.clone(), phi: phi.clone() })
            .expect("member of the group");
        let ka = Formula::know(a.clone(), phi.clone());
        forward = Some(match forward {
            None => {
                acc = ka;
                ae
            }
            Some(prev) => {
                let next = Formula::and(acc.clone(), ka.clone());
                let t = b.taut(imp(
                    imp(e.clone(), acc.clone()),
                    imp(imp(e.clone(), ka), imp(e.clone(), next.clone())),
                ));
                let partial = b.mp(prev, t);
                acc = next;
                b.mp(ae, partial)
            }
        });
    }
    let forward = forward.expect("nonempty group");

    // ⋀ K_i φ -> E_G φ: RE with k = 0, θ_0 = ⋀ K_i φ
    let spec = NestedSpec { thetas: vec![conj.clone()], ops: Vec::new() };
    let mut premises = BTreeMap::new();
    for (a, ka) in members.iter().zip(&ks) {
        let p = b.taut(imp(conj.clone(), ka.clone()));
        premises.insert(a.clone(), p);
    }
    let backward = b.re(&spec, group, phi, premises);
    // (a -> b) ∧ (b -> a) is how `<->` is stored
    b.and_intro(forward, backward);
    b.finish()
}

/// `C_G φ -> E_G(φ ∧ C_G φ)` with an RC certificate of the given bound.
///
/// The RC step uses `k = 1`, `θ_0 = ⊤`, `X_1 = K_a`, `θ_1 = C_G φ` for each
/// member `a`, deriving `C_G φ -> K_a(⊤ -> C_G φ)`; RE then assembles
/// `E_G C_G φ` and AC supplies `E_G φ`.
pub fn fixed_point_proof(group: &Group, phi: &Formula, bound: u32) -> Proof {
    let mut b = ProofBuilder::new(ProofMode::Plain);
    let imp = Formula::implies;
    let c = Formula::common(group.clone(), phi.clone());
    let top = Formula::top();
    let e = |f: Formula| Formula::everyone(group.clone(), f);

    let mut per_member = BTreeMap::new();
    for a in group.members() {
        let spec = NestedSpec { thetas: vec![top.clone(), c.clone()], ops: vec![crate::syntax::NestOp::Know(a.clone())] };
        let mut cert = Certificate { bound, premises: BTreeMap::new() };
        for m in 1..=bound {
            // C φ -> E^{m+1} φ  (AC), E^{m+1} φ -> K_a E^m φ  (AE), K_a E^m φ -> K_a(⊤ -> E^m φ)
            let em = iterate_e(group, m, phi.clone()).expect("m >= 1");
            let ac = b
                .axiom(&AxiomParams::AC { group: group.clone(), m: m + 1, phi: phi.clone() })
                .expect("m + 1 >= 1");
            let ae = b
                .axiom(&AxiomParams::AE { group: group.clone(), agent: a.clone(), phi: em.clone() })
                .expect("member of the group");
            let to_k = b.chain(ac, ae);
            let wrap = b.taut(imp(em.clone(), imp(top.clone(), em.clone())));
            let k_wrap = b.know_mono(wrap, a);
            let premise = b.chain(to_k, k_wrap);
            cert.premises.insert(m, premise);
        }
        let rc = b.rc(&spec, group, phi, cert);
        // C φ -> K_a(⊤ -> C φ)  ==>  C φ -> K_a C φ
        let unwrap = b.taut(imp(imp(top.clone(), c.clone()), c.clone()));
        let k_unwrap = b.know_mono(unwrap, a);
        let kc = b.chain(rc, k_unwrap);
        per_member.insert(a.clone(), kc);
    }
    // RE with θ_0 = C φ: C φ -> E_G C φ
    let spec = NestedSpec { thetas: vec![c.clone()], ops: Vec::new() };
    let ec = b.re(&spec, group, &c, per_member);
    // C φ -> E_G φ  (AC, m = 1)
    let ac1 = b.axiom(&AxiomParams::AC { group: group.clone(), m: 1, phi: phi.clone() }).expect("m = 1");
    // E_G φ ∧ E_G C φ -> E_G(φ ∧ C φ): K-conjunction per member, then RE
    let conj = Formula::and(phi.clone(), c.clone());
    let both = Formula::and(e(phi.clone()), e(c.clone()));
    let mut members = BTreeMap::new();
    for a in group.members() {
        let ka = |f: Formula| Formula::know(a.clone(), f);
        // K_a(φ -> (C -> φ ∧ C)) then AK twice
        let t = b.taut(imp(phi.clone(), imp(c.clone(), conj.clone())));
        let step1 = b.know_mono(t, a); // K φ -> K(C -> φ∧C)
        let ak = b
            .axiom(&AxiomParams::AK { agent: a.clone(), phi: c.clone(), psi: conj.clone() })
            .expect("AK has no side conditions");
        // (K C ∧ K(C -> φ∧C)) -> K(φ∧C)  ==>  K(C -> φ∧C) -> (K C -> K(φ∧C))
        let swapped = b.by_taut(
            ak,
            imp(ka(imp(c.clone(), conj.clone())), imp(ka(c.clone()), ka(conj.clone()))),
        );
        let kphi_to = b.chain(step1, swapped); // K φ -> (K C -> K(φ∧C))
        // E φ -> K φ, E C -> K C
        let ae_phi = b
            .axiom(&AxiomParams::AE { group: group.clone(), agent: a.clone(), phi: phi.clone() })
            .expect("member");
        let ae_c = b
            .axiom(&AxiomParams::AE { group: group.clone(), agent: a.clone(), phi: c.clone() })
            .expect("member");
        // glue: (Eφ->Kφ) -> (EC->KC) -> (Kφ->(KC->K conj)) -> (Eφ ∧ EC -> K conj)
        let (ephi, ec_f, kphi, kc, kconj) = (e(phi.clone()), e(c.clone()), ka(phi.clone()), ka(c.clone()), ka(conj.clone()));
        let glue = b.taut(imp(
            imp(ephi.clone(), kphi.clone()),
            imp(
                imp(ec_f.clone(), kc.clone()),
                imp(imp(kphi, imp(kc, kconj.clone())), imp(both.clone(), kconj)),
            ),
        ));
        let g1 = b.mp(ae_phi, glue);
        let g2 = b.mp(ae_c, g1);
        let premise = b.mp(kphi_to, g2);
        members.insert(a.clone(), premise);
    }
    let spec = NestedSpec { thetas: vec![both.clone()], ops: Vec::new() };
    let e_conj = b.re(&spec, group, &conj, members); // Eφ ∧ EC -> E(φ∧C)
    // C -> Eφ, C -> EC  ==>  C -> Eφ ∧ EC  ==>  C -> E(φ∧C)
    let t = b.taut(imp(
        imp(c.clone(), e(phi.clone())),
        imp(imp(c.clone(), e(c.clone())), imp(c.clone(), both.clone())),
    ));
    let t1 = b.mp(ac1, t);
    let c_both = b.mp(ec, t1);
    b.chain(c_both, e_conj);
    b.finish()
}

/// Certificate premises `(F_G^r)^m` are exposed for tests of RPC shapes.
pub fn rpc_premise(spec: &NestedSpec, group: &Group, r: &Rational01, m: u32, phi: &Formula) -> Formula {
    nested_implication(spec, iterate_f(group, r, m, phi)).expect("well-formed spec")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::proof::{check, ProofVerdict};

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn k_distribution_checks() {
        let proof = k_distribution_proof(&"i".into(), &p("q"), &p("r"));
        assert_eq!(check(&proof), ProofVerdict::Accepted);
        assert_eq!(proof.conclusion(), Some(&p("K[i] (q -> r) -> (K[i] q -> K[i] r)")));
    }

    #[test]
    fn everyone_equivalence_checks() {
        let proof = everyone_equivalence_proof(&Group::of(&["a", "b"]), &p("q"));
        assert_eq!(check(&proof), ProofVerdict::Accepted);
        assert_eq!(proof.conclusion(), Some(&p("E{a,b} q <-> K[a] q & K[b] q")));
    }

    #[test]
    fn fixed_point_checks_with_bounded_certificate() {
        let proof = fixed_point_proof(&Group::of(&["a", "b"]), &p("q"), 4);
        assert_eq!(check(&proof), ProofVerdict::AcceptedWithBoundedCertificates { bound: 4 });
        assert_eq!(proof.conclusion(), Some(&p("C{a,b} q -> E{a,b} (q & C{a,b} q)")));
    }
}
