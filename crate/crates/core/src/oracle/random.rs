use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::axioms::{AxiomName, AxiomParams};
use crate::proof::{Proof, ProofBuilder, ProofMode};
use crate::model::{state_set, Model, ModelBuilder, ProbSpace, StateSet};
use crate::rational::Rational01;
use crate::syntax::{free_vars, AgentId, Formula, Group, NestOp, NestedSpec, Term};

/// The fixed vocabulary of the fuzzers: agents `a, b`, propositions `p, q`,
/// a unary relation `R`, a constant `c` and a unary function `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzSignature {
    pub agents: Vec<AgentId>,
    pub groups: Vec<Group>,
    pub props: Vec<String>,
    pub unary: Vec<String>,
    pub constants: Vec<String>,
    pub functions: Vec<String>,
    pub vars: Vec<String>,
    pub grid: Vec<Rational01>,
    pub max_states: usize,
    pub max_domain: usize,
}

impl Default for FuzzSignature {
    fn default() -> Self {
        let agents: Vec<AgentId> = vec!["a".into(), "b".into()];
        FuzzSignature {
            groups: vec![Group::of(&["a"]), Group::of(&["b"]), Group::of(&["a", "b"])],
            agents,
            props: vec!["p".into(), "q".into()],
            unary: vec!["R".into()],
            constants: vec!["c".into()],
            functions: vec!["f".into()],
            vars: vec!["x".into(), "y".into()],
            grid: super::default_grid(),
            max_states: 3,
            max_domain: 2,
        }
    }
}

impl FuzzSignature {
    fn agent(&self, rng: &mut impl Rng) -> AgentId {
        self.agents.choose(rng).expect("agents").clone()
    }

    fn group(&self, rng: &mut impl Rng) -> Group {
        self.groups.choose(rng).expect("groups").clone()
    }

    fn weight(&self, rng: &mut impl Rng) -> Rational01 {
        self.grid.choose(rng).expect("grid").clone()
    }

    fn term(&self, rng: &mut impl Rng, vars: &[String]) -> Term {
        let c = Term::constant(self.constants.choose(rng).expect("constants").clone());
        let base = if !vars.is_empty() && rng.gen_bool(0.6) { Term::var(vars.choose(rng).expect("vars").clone()) } else { c };
        if rng.gen_bool(0.25) {
            Term::app(self.functions.choose(rng).expect("functions").clone(), vec![base])
        } else {
            base
        }
    }

    fn leaf(&self, rng: &mut impl Rng, vars: &[String]) -> Formula {
        if rng.gen_bool(0.6) {
            Formula::prop(self.props.choose(rng).expect("props").clone())
        } else {
            Formula::atom(self.unary.choose(rng).expect("unary").clone(), vec![self.term(rng, vars)])
        }
    }
}

/// A random formula of modal/connective depth at most `depth` whose
/// variables come from `vars`.
pub fn random_formula(rng: &mut impl Rng, sig: &FuzzSignature, depth: usize, vars: &[String]) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return sig.leaf(rng, vars);
    }
    let sub = |rng: &mut _| random_formula(rng, sig, depth - 1, vars);
    match rng.gen_range(0..11) {
        0 | 1 => Formula::not(sub(rng)),
        2 | 3 => {
            let a = sub(rng);
            Formula::and(a, sub(rng))
        }
        4 => {
            let x = sig.vars.choose(rng).expect("vars").clone();
            let mut inner_vars = vars.to_vec();
            if !inner_vars.contains(&x) {
                inner_vars.push(x.clone());
            }
            Formula::forall(x, random_formula(rng, sig, depth - 1, &inner_vars))
        }
        5 => Formula::know(sig.agent(rng), sub(rng)),
        6 => Formula::everyone(sig.group(rng), sub(rng)),
        7 => Formula::common(sig.group(rng), sub(rng)),
        8 => Formula::prob(sig.agent(rng), sig.weight(rng), sub(rng)),
        9 => Formula::everyone_prob(sig.group(rng), sig.weight(rng), sub(rng)),
        _ => Formula::common_prob(sig.group(rng), sig.weight(rng), sub(rng)),
    }
}

fn small(rng: &mut impl Rng, sig: &FuzzSignature) -> Formula {
    let vars = if rng.gen_bool(0.3) { sig.vars.clone() } else { Vec::new() };
    random_formula(rng, sig, 2, &vars)
}

/// A random tautology from a handful of propositional templates.
fn tautology(rng: &mut impl Rng, sig: &FuzzSignature) -> Formula {
    let (a, b, c) = (small(rng, sig), small(rng, sig), small(rng, sig));
    let imp = Formula::implies;
    match rng.gen_range(0..7) {
        0 => imp(a.clone(), imp(b, a)),
        1 => imp(imp(a.clone(), imp(b.clone(), c.clone())), imp(imp(a.clone(), b), imp(a, c))),
        2 => imp(imp(Formula::not(a.clone()), Formula::not(b.clone())), imp(b, a)),
        3 => Formula::or(a.clone(), Formula::not(a)),
        4 => imp(Formula::and(a, b.clone()), b),
        5 => Formula::iff(Formula::and(a.clone(), b.clone()), Formula::and(b, a)),
        _ => imp(imp(Formula::and(a.clone(), b.clone()), c.clone()), imp(a, imp(b, c))),
    }
}

/// A random finite plain-mode proof from one or two sentence hypotheses.
///
/// Each of the `moves` moves cites a hypothesis, instantiates a base axiom
/// or tautology, weakens or conjoins earlier steps, generalizes, applies
/// `RK`/`RP` to a hypothesis-free step, or closes an `RE`/`RPE` step of
/// depth 0 or 1 whose premises come from an earlier step. The ω-rules with
/// certificates are never used.
pub fn random_proof(rng: &mut impl Rng, sig: &FuzzSignature, moves: usize) -> Proof {
    let n_hyps = rng.gen_range(1..=2);
    let hyps: Vec<Formula> = (0..n_hyps).map(|_| random_formula(rng, sig, 2, &[])).collect();
    let mut b = ProofBuilder::with_hypotheses(ProofMode::Plain, hyps.clone());
    b.hyp(hyps[0].clone());
    let imp = Formula::implies;
    for _ in 0..moves {
        let last = b.len() - 1;
        let s = rng.gen_range(0..b.len());
        match rng.gen_range(0..9) {
            0 => {
                b.hyp(hyps.choose(rng).expect("hypotheses").clone());
            }
            1 => {
                let schema = *AxiomName::BASE.choose(rng).expect("schemas");
                b.axiom(&random_instance(rng, sig, schema)).expect("generated instances meet their side conditions");
            }
            2 => {
                b.taut(tautology(rng, sig));
            }
            3 => {
                let extra = small(rng, sig);
                let weaker = Formula::or(b.formula(s).clone(), extra);
                b.by_taut(s, weaker);
            }
            4 => {
                b.and_intro(s, last);
            }
            5 => {
                let x = sig.vars.choose(rng).expect("vars").clone();
                b.generalize(s, &x);
            }
            6 => {
                let theorems: Vec<usize> =
                    b.proof().theorem_flags().iter().enumerate().filter(|(_, t)| **t).map(|(i, _)| i).collect();
                if let Some(&t) = theorems.choose(rng) {
                    let agent = sig.agent(rng);
                    if rng.gen_bool(0.5) {
                        b.rk(t, &agent);
                    } else {
                        b.rp(t, &agent);
                    }
                }
            }
            _ => {
                // premises θ_k -> X(... -> τ_i) follow from any step by a
                // tautology: θ_k is the conjunction of their consequents
                let group = sig.group(rng);
                let phi = small(rng, sig);
                let prob = rng.gen_bool(0.4);
                let r = sig.weight(rng);
                let tau = |i: &AgentId| {
                    if prob {
                        Formula::know_prob(i.clone(), r.clone(), phi.clone())
                    } else {
                        Formula::know(i.clone(), phi.clone())
                    }
                };
                let theta0 = small(rng, sig);
                let outer: Option<AgentId> = rng.gen_bool(0.5).then(|| sig.agent(rng));
                let inner = |i: &AgentId| match &outer {
                    Some(c) => Formula::know(c.clone(), imp(theta0.clone(), tau(i))),
                    None => tau(i),
                };
                let members = group.members();
                let theta_k =
                    members[1..].iter().fold(inner(&members[0]), |acc, i| Formula::and(acc, inner(i)));
                let spec = match &outer {
                    Some(c) => NestedSpec { thetas: vec![theta0.clone(), theta_k.clone()], ops: vec![NestOp::Know(c.clone())] },
                    None => NestedSpec { thetas: vec![theta_k.clone()], ops: Vec::new() },
                };
                let mut premises = BTreeMap::new();
                for i in members {
                    let target = imp(theta_k.clone(), inner(i));
                    premises.insert(i.clone(), b.by_taut(s, target));
                }
                if prob {
                    b.rpe(&spec, &group, &r, &phi, premises);
                } else {
                    b.re(&spec, &group, &phi, premises);
                }
            }
        }
    }
    b.finish()
}

fn ordered_pair(rng: &mut impl Rng, sig: &FuzzSignature, strict: bool) -> (Rational01, Rational01) {
    loop {
        let (r, t) = (sig.weight(rng), sig.weight(rng));
        if (strict && r < t) || (!strict && r.checked_add(&t).is_some()) {
            return (r, t);
        }
    }
}

fn member_of(rng: &mut impl Rng, g: &Group) -> AgentId {
    g.members().choose(rng).expect("nonempty group").clone()
}

/// Parameters for one random instance of `schema` over `sig`.
pub fn random_instance(rng: &mut impl Rng, sig: &FuzzSignature, schema: AxiomName) -> AxiomParams {
    use AxiomParams as A;
    let phi = small(rng, sig);
    let psi = small(rng, sig);
    match schema {
        AxiomName::Prop => A::Prop(tautology(rng, sig)),
        AxiomName::FO1 => {
            let x = sig.vars.choose(rng).expect("vars").clone();
            let mut antecedent = phi;
            while free_vars(&antecedent).contains(&x) {
                antecedent = small(rng, sig);
            }
            A::FO1 { x, phi: antecedent, psi }
        }
        AxiomName::FO2 => {
            let x = sig.vars.choose(rng).expect("vars").clone();
            let t = sig.term(rng, &sig.vars);
            let free_for = crate::syntax::is_free_for(&t, &x, &phi);
            let t = if free_for { t } else { Term::constant(sig.constants[0].clone()) };
            A::FO2 { x, phi, t }
        }
        AxiomName::FO3 => A::FO3 { x: sig.vars.choose(rng).expect("vars").clone(), agent: sig.agent(rng), phi },
        AxiomName::AK => A::AK { agent: sig.agent(rng), phi, psi },
        AxiomName::AE => {
            let group = sig.group(rng);
            A::AE { agent: member_of(rng, &group), group, phi }
        }
        AxiomName::AC => A::AC { group: sig.group(rng), m: rng.gen_range(1..=3), phi },
        AxiomName::P1 => A::P1 { agent: sig.agent(rng), phi },
        AxiomName::P2 => {
            let (r, t) = ordered_pair(rng, sig, true);
            A::P2 { agent: sig.agent(rng), r, t, phi }
        }
        AxiomName::P3 => A::P3 { agent: sig.agent(rng), t: sig.weight(rng), phi },
        AxiomName::P4 => A::P4 { agent: sig.agent(rng), r: sig.weight(rng), t: sig.weight(rng), phi, psi },
        AxiomName::P5 => {
            let (r, t) = ordered_pair(rng, sig, false);
            A::P5 { agent: sig.agent(rng), r, t, phi, psi }
        }
        AxiomName::APE => {
            let group = sig.group(rng);
            A::APE { agent: member_of(rng, &group), group, r: sig.weight(rng), phi }
        }
        AxiomName::APC => A::APC { group: sig.group(rng), r: sig.weight(rng), m: rng.gen_range(0..=3), phi },
        AxiomName::CON => A::CON { agent: sig.agent(rng), phi },
        AxiomName::OBJ => A::OBJ { i: sig.agent(rng), j: sig.agent(rng), r: sig.weight(rng), phi },
        AxiomName::SdpA => A::SdpA { agent: sig.agent(rng), r: sig.weight(rng), phi },
        AxiomName::UnifA => A::UnifA { agent: sig.agent(rng), r: sig.weight(rng), phi },
    }
}

fn random_subset(rng: &mut impl Rng, n: usize, p: f64) -> StateSet {
    state_set(n, (0..n).filter(|_| rng.gen_bool(p)))
}

fn nonempty_subset_of(rng: &mut impl Rng, n: usize, within: &StateSet) -> StateSet {
    let members: Vec<usize> = within.ones().collect();
    loop {
        let set = state_set(n, members.iter().copied().filter(|_| rng.gen_bool(0.6)));
        if set.count_ones(..) > 0 {
            return set;
        }
    }
}

/// A random space on `sample`; with `coarse`, atoms may merge states.
fn random_space(rng: &mut impl Rng, n: usize, sample: &StateSet, coarse: bool) -> ProbSpace {
    let members: Vec<usize> = sample.ones().collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &s in &members {
        if coarse && !blocks.is_empty() && rng.gen_bool(0.5) {
            let b = rng.gen_range(0..blocks.len());
            blocks[b].push(s);
        } else {
            blocks.push(vec![s]);
        }
    }
    let mut raw: Vec<i64> = blocks.iter().map(|_| rng.gen_range(0..=4)).collect();
    if raw.iter().all(|w| *w == 0) {
        raw[0] = 1;
    }
    let total: i64 = raw.iter().sum();
    let atoms = blocks.iter().map(|b| state_set(n, b.iter().copied())).collect();
    ProbSpace::new(sample.clone(), atoms, raw.iter().map(|w| Rational01::frac(*w, total)).collect())
}

fn skeleton(rng: &mut impl Rng, sig: &FuzzSignature) -> ModelBuilder {
    let n = rng.gen_range(1..=sig.max_states);
    let d = rng.gen_range(1..=sig.max_domain);
    let agents: Vec<&str> = sig.agents.iter().map(AgentId::as_str).collect();
    let mut mb = ModelBuilder::indexed(n, d, &agents);
    for p in &sig.props {
        mb.relation(p, 0);
        for s in 0..n {
            if rng.gen_bool(0.5) {
                mb.fact(p, s, Vec::new());
            }
        }
    }
    for r in &sig.unary {
        mb.relation(r, 1);
        for s in 0..n {
            for e in 0..d {
                if rng.gen_bool(0.5) {
                    mb.fact(r, s, vec![e]);
                }
            }
        }
    }
    for c in &sig.constants {
        mb.constant(c, rng.gen_range(0..d));
    }
    for f in &sig.functions {
        let table: BTreeMap<Vec<usize>, usize> = (0..d).map(|e| (vec![e], rng.gen_range(0..d))).collect();
        mb.function(f, 1, table);
    }
    mb
}

/// A random model over `sig`. About a quarter of the spaces have coarse
/// atoms, so some formulas are not measurable in some models.
pub fn random_model(rng: &mut impl Rng, sig: &FuzzSignature) -> Model {
    let mut mb = skeleton(rng, sig);
    let n = mb.n_states();
    let coarse_model = rng.gen_bool(0.25);
    for i in 0..sig.agents.len() {
        for s in 0..n {
            let acc = random_subset(rng, n, 0.5);
            mb.access_set(i, s, acc.clone());
            if rng.gen_bool(0.5) {
                continue;
            }
            let sample = nonempty_subset_of(rng, n, &crate::model::full_set(n));
            mb.space(i, s, random_space(rng, n, &sample, coarse_model));
        }
    }
    mb.default_spaces();
    mb.build().expect("random models are valid by construction")
}

/// The model classes with extra axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelClass {
    Con,
    Obj,
    Sdp,
    Unif,
}

impl ModelClass {
    pub const ALL: [ModelClass; 4] = [ModelClass::Con, ModelClass::Obj, ModelClass::Sdp, ModelClass::Unif];

    pub fn axiom(&self) -> AxiomName {
        match self {
            ModelClass::Con => AxiomName::CON,
            ModelClass::Obj => AxiomName::OBJ,
            ModelClass::Sdp => AxiomName::SdpA,
            ModelClass::Unif => AxiomName::UnifA,
        }
    }

    pub fn holds(&self, m: &Model) -> bool {
        let flags = m.classify();
        match self {
            ModelClass::Con => flags.con,
            ModelClass::Obj => flags.obj,
            ModelClass::Sdp => flags.sdp,
            ModelClass::Unif => flags.unif,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelClass::Con => "CON",
            ModelClass::Obj => "OBJ",
            ModelClass::Sdp => "SDP",
            ModelClass::Unif => "UNIF",
        }
    }
}

/// Random cells: `cell[s]` is the block containing `s`.
fn random_cells(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut cell = Vec::with_capacity(n);
    let mut blocks = 0;
    for _ in 0..n {
        if blocks > 0 && rng.gen_bool(0.5) {
            cell.push(rng.gen_range(0..blocks));
        } else {
            cell.push(blocks);
            blocks += 1;
        }
    }
    cell
}

/// A random model of the given class, built to satisfy its defining
/// condition (and checked against [`Model::classify`]).
pub fn class_model(rng: &mut impl Rng, sig: &FuzzSignature, class: ModelClass) -> Model {
    loop {
        let mut mb = skeleton(rng, sig);
        let n = mb.n_states();
        let full = crate::model::full_set(n);
        let coarse = rng.gen_bool(0.2);
        let k = sig.agents.len();
        match class {
            ModelClass::Con => {
                for i in 0..k {
                    for s in 0..n {
                        let acc = nonempty_subset_of(rng, n, &full);
                        let sample = nonempty_subset_of(rng, n, &acc);
                        mb.access_set(i, s, acc);
                        mb.space(i, s, random_space(rng, n, &sample, coarse));
                    }
                }
            }
            ModelClass::Obj => {
                for s in 0..n {
                    let sample = nonempty_subset_of(rng, n, &full);
                    let space = random_space(rng, n, &sample, coarse);
                    for i in 0..k {
                        mb.access_set(i, s, random_subset(rng, n, 0.5));
                        mb.space(i, s, space.clone());
                    }
                }
            }
            ModelClass::Sdp | ModelClass::Unif => {
                for i in 0..k {
                    let cell = random_cells(rng, n);
                    let blocks = cell.iter().max().map_or(0, |m| m + 1);
                    let spaces: Vec<ProbSpace> = (0..blocks)
                        .map(|b| {
                            let within = match class {
                                ModelClass::Unif => state_set(n, (0..n).filter(|t| cell[*t] == b)),
                                _ => full.clone(),
                            };
                            let sample = nonempty_subset_of(rng, n, &within);
                            random_space(rng, n, &sample, coarse)
                        })
                        .collect();
                    for s in 0..n {
                        let acc = match class {
                            ModelClass::Sdp => {
                                let mine = state_set(n, (0..n).filter(|t| cell[*t] == cell[s]));
                                state_set(n, mine.ones().filter(|_| rng.gen_bool(0.6)))
                            }
                            _ => random_subset(rng, n, 0.5),
                        };
                        mb.access_set(i, s, acc);
                        mb.space(i, s, spaces[cell[s]].clone());
                    }
                }
            }
        }
        let model = mb.build().expect("class models are valid by construction");
        if class.holds(&model) {
            return model;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::instantiate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_schema_instantiates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sig = FuzzSignature::default();
        for name in AxiomName::ALL {
            for _ in 0..50 {
                let params = random_instance(&mut rng, &sig, name);
                assert_eq!(params.name(), name);
                instantiate(&params).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }

    #[test]
    fn class_generators_hit_their_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sig = FuzzSignature::default();
        for class in ModelClass::ALL {
            for _ in 0..20 {
                assert!(class.holds(&class_model(&mut rng, &sig, class)));
            }
        }
    }

    #[test]
    fn generated_proofs_check() {
        use crate::proof::{check, deduction_transform, strong_necessitation_transform};
        let sig = FuzzSignature::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let proof = random_proof(&mut rng, &sig, 8);
            assert!(check(&proof).is_accepted(), "{:?} {:#?}", check(&proof), proof.steps.iter().map(|s| crate::parser::print_formula(&s.formula)).collect::<Vec<_>>());
            let d = deduction_transform(&proof, 0).unwrap();
            assert!(check(&d).is_accepted(), "{:?}", check(&d));
            let k = strong_necessitation_transform(&proof, &AgentId::new("b")).unwrap();
            assert!(check(&k).is_accepted(), "{:?}", check(&k));
        }
    }
}
