//! Axiom schemata: recognition of instances and instantiation from
//! parameters.
//!
//! All schemata are matched syntactically against the primitive form of a
//! formula. `Prop` is decided rather than enumerated: a formula is an
//! instance iff it is a boolean tautology over its maximal subformulas whose
//! head is neither `!` nor `&`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational01;
use crate::syntax::{
    free_vars, is_free_for, iterate_e, iterate_f, match_substitution, peel_e, peel_f, substitute, AgentId,
    Formula, Group, Term, Var,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxiomName {
    Prop,
    FO1,
    FO2,
    FO3,
    AK,
    AE,
    AC,
    P1,
    P2,
    P3,
    P4,
    P5,
    APE,
    APC,
    CON,
    OBJ,
    #[serde(rename = "SDP-A")]
    SdpA,
    #[serde(rename = "UNIF-A")]
    UnifA,
}

impl AxiomName {
    pub const ALL: [AxiomName; 18] = [
        AxiomName::Prop,
        AxiomName::FO1,
        AxiomName::FO2,
        AxiomName::FO3,
        AxiomName::AK,
        AxiomName::AE,
        AxiomName::AC,
        AxiomName::P1,
        AxiomName::P2,
        AxiomName::P3,
        AxiomName::P4,
        AxiomName::P5,
        AxiomName::APE,
        AxiomName::APC,
        AxiomName::CON,
        AxiomName::OBJ,
        AxiomName::SdpA,
        AxiomName::UnifA,
    ];

    /// The schemata valid on every model.
    pub const BASE: [AxiomName; 14] = [
        AxiomName::Prop,
        AxiomName::FO1,
        AxiomName::FO2,
        AxiomName::FO3,
        AxiomName::AK,
        AxiomName::AE,
        AxiomName::AC,
        AxiomName::P1,
        AxiomName::P2,
        AxiomName::P3,
        AxiomName::P4,
        AxiomName::P5,
        AxiomName::APE,
        AxiomName::APC,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AxiomName::Prop => "Prop",
            AxiomName::FO1 => "FO1",
            AxiomName::FO2 => "FO2",
            AxiomName::FO3 => "FO3",
            AxiomName::AK => "AK",
            AxiomName::AE => "AE",
            AxiomName::AC => "AC",
            AxiomName::P1 => "P1",
            AxiomName::P2 => "P2",
            AxiomName::P3 => "P3",
            AxiomName::P4 => "P4",
            AxiomName::P5 => "P5",
            AxiomName::APE => "APE",
            AxiomName::APC => "APC",
            AxiomName::CON => "CON",
            AxiomName::OBJ => "OBJ",
            AxiomName::SdpA => "SDP-A",
            AxiomName::UnifA => "UNIF-A",
        }
    }
}

impl fmt::Display for AxiomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxiomName {
    type Err = AxiomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxiomName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| AxiomError::UnknownName(s.to_string()))
    }
}

/// Which schemata beyond the base system are in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AxiomSet {
    pub con: bool,
    pub obj: bool,
    pub sdp: bool,
    pub unif: bool,
}

impl AxiomSet {
    pub fn plain() -> Self {
        AxiomSet::default()
    }

    pub fn with_con() -> Self {
        AxiomSet { con: true, ..AxiomSet::default() }
    }

    pub fn all() -> Self {
        AxiomSet { con: true, obj: true, sdp: true, unif: true }
    }

    pub fn allows(&self, name: AxiomName) -> bool {
        match name {
            AxiomName::CON => self.con,
            AxiomName::OBJ => self.obj,
            AxiomName::SdpA => self.sdp,
            AxiomName::UnifA => self.unif,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("unknown axiom `{0}`")]
    UnknownName(String),
    #[error("side condition violated: {0}")]
    SideCondition(String),
    #[error("not a propositional tautology")]
    NotTautology,
}

/// Metavariable bindings, one variant per schema.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AxiomParams {
    /// The tautology itself.
    Prop(Formula),
    /// `∀x(φ -> ψ) -> (φ -> ∀x ψ)`, `x` not free in `φ`
    FO1 { x: Var, phi: Formula, psi: Formula },
    /// `∀x φ -> φ[t/x]`, `t` free for `x` in `φ`
    FO2 { x: Var, phi: Formula, t: Term },
    /// `∀x K_i φ -> K_i ∀x φ`
    FO3 { x: Var, agent: AgentId, phi: Formula },
    /// `(K_i φ ∧ K_i(φ -> ψ)) -> K_i ψ`
    AK { agent: AgentId, phi: Formula, psi: Formula },
    /// `E_G φ -> K_i φ`, `i ∈ G`
    AE { group: Group, agent: AgentId, phi: Formula },
    /// `C_G φ -> (E_G)^m φ`, `m >= 1`
    AC { group: Group, m: u32, phi: Formula },
    /// `P_{i,>=0} φ`
    P1 { agent: AgentId, phi: Formula },
    /// `P_{i,<=r} φ -> P_{i,<t} φ`, `t > r`
    P2 { agent: AgentId, r: Rational01, t: Rational01, phi: Formula },
    /// `P_{i,<t} φ -> P_{i,<=t} φ`
    P3 { agent: AgentId, t: Rational01, phi: Formula },
    /// `(P_{i,>=r} φ ∧ P_{i,>=t} ψ ∧ P_{i,>=1} ¬(φ ∧ ψ)) -> P_{i,>=min(1,r+t)}(φ ∨ ψ)`
    P4 { agent: AgentId, r: Rational01, t: Rational01, phi: Formula, psi: Formula },
    /// `(P_{i,<=r} φ ∧ P_{i,<t} ψ) -> P_{i,<r+t}(φ ∨ ψ)`, `r + t <= 1`
    P5 { agent: AgentId, r: Rational01, t: Rational01, phi: Formula, psi: Formula },
    /// `E_G^r φ -> K_i^r φ`, `i ∈ G`
    APE { group: Group, agent: AgentId, r: Rational01, phi: Formula },
    /// `C_G^r φ -> (F_G^r)^m φ`
    APC { group: Group, r: Rational01, m: u32, phi: Formula },
    /// `K_i φ -> P_{i,>=1} φ`
    CON { agent: AgentId, phi: Formula },
    /// `P_{i,>=r} φ -> P_{j,>=r} φ`
    OBJ { i: AgentId, j: AgentId, r: Rational01, phi: Formula },
    /// `P_{i,>=r} φ -> K_i P_{i,>=r} φ`
    SdpA { agent: AgentId, r: Rational01, phi: Formula },
    /// `P_{i,>=r} φ -> P_{i,>=1} P_{i,>=r} φ`
    UnifA { agent: AgentId, r: Rational01, phi: Formula },
}

impl AxiomParams {
    pub fn name(&self) -> AxiomName {
        match self {
            AxiomParams::Prop(_) => AxiomName::Prop,
            AxiomParams::FO1 { .. } => AxiomName::FO1,
            AxiomParams::FO2 { .. } => AxiomName::FO2,
            AxiomParams::FO3 { .. } => AxiomName::FO3,
            AxiomParams::AK { .. } => AxiomName::AK,
            AxiomParams::AE { .. } => AxiomName::AE,
            AxiomParams::AC { .. } => AxiomName::AC,
            AxiomParams::P1 { .. } => AxiomName::P1,
            AxiomParams::P2 { .. } => AxiomName::P2,
            AxiomParams::P3 { .. } => AxiomName::P3,
            AxiomParams::P4 { .. } => AxiomName::P4,
            AxiomParams::P5 { .. } => AxiomName::P5,
            AxiomParams::APE { .. } => AxiomName::APE,
            AxiomParams::APC { .. } => AxiomName::APC,
            AxiomParams::CON { .. } => AxiomName::CON,
            AxiomParams::OBJ { .. } => AxiomName::OBJ,
            AxiomParams::SdpA { .. } => AxiomName::SdpA,
            AxiomParams::UnifA { .. } => AxiomName::UnifA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomInstance {
    pub params: AxiomParams,
    pub formula: Formula,
}

impl AxiomInstance {
    pub fn name(&self) -> AxiomName {
        self.params.name()
    }
}

fn side(cond: bool, msg: impl FnOnce() -> String) -> Result<(), AxiomError> {
    if cond {
        Ok(())
    } else {
        Err(AxiomError::SideCondition(msg()))
    }
}

/// Builds the schema instance, checking side conditions.
pub fn instantiate(params: &AxiomParams) -> Result<Formula, AxiomError> {
    use AxiomParams as A;
    let imp = Formula::implies;
    let f = match params {
        A::Prop(f) => {
            if !tautology_check(f) {
                return Err(AxiomError::NotTautology);
            }
            f.clone()
        }
        A::FO1 { x, phi, psi } => {
            side(!free_vars(phi).contains(x), || format!("`{x}` is free in the antecedent"))?;
            imp(
                Formula::forall(x.clone(), imp(phi.clone(), psi.clone())),
                imp(phi.clone(), Formula::forall(x.clone(), psi.clone())),
            )
        }
        A::FO2 { x, phi, t } => {
            side(is_free_for(t, x, phi), || format!("term is not free for `{x}`"))?;
            let inst = substitute(phi, x, t).map_err(|e| AxiomError::SideCondition(e.to_string()))?;
            imp(Formula::forall(x.clone(), phi.clone()), inst)
        }
        A::FO3 { x, agent, phi } => imp(
            Formula::forall(x.clone(), Formula::know(agent.clone(), phi.clone())),
            Formula::know(agent.clone(), Formula::forall(x.clone(), phi.clone())),
        ),
        A::AK { agent, phi, psi } => imp(
            Formula::and(
                Formula::know(agent.clone(), phi.clone()),
                Formula::know(agent.clone(), imp(phi.clone(), psi.clone())),
            ),
            Formula::know(agent.clone(), psi.clone()),
        ),
        A::AE { group, agent, phi } => {
            side(group.contains(agent), || format!("`{agent}` is not a member of the group"))?;
            imp(Formula::everyone(group.clone(), phi.clone()), Formula::know(agent.clone(), phi.clone()))
        }
        A::AC { group, m, phi } => {
            let iter = iterate_e(group, *m, phi.clone()).map_err(|e| AxiomError::SideCondition(e.to_string()))?;
            imp(Formula::common(group.clone(), phi.clone()), iter)
        }
        A::P1 { agent, phi } => Formula::prob(agent.clone(), Rational01::zero(), phi.clone()),
        A::P2 { agent, r, t, phi } => {
            side(t > r, || format!("P2 needs t > r, got r = {r}, t = {t}"))?;
            imp(Formula::prob_le(agent.clone(), r.clone(), phi.clone()), Formula::prob_lt(agent.clone(), t.clone(), phi.clone()))
        }
        A::P3 { agent, t, phi } => {
            imp(Formula::prob_lt(agent.clone(), t.clone(), phi.clone()), Formula::prob_le(agent.clone(), t.clone(), phi.clone()))
        }
        A::P4 { agent, r, t, phi, psi } => imp(
            Formula::and(
                Formula::and(
                    Formula::prob(agent.clone(), r.clone(), phi.clone()),
                    Formula::prob(agent.clone(), t.clone(), psi.clone()),
                ),
                Formula::prob(agent.clone(), Rational01::one(), Formula::not(Formula::and(phi.clone(), psi.clone()))),
            ),
            Formula::prob(agent.clone(), r.saturating_add(t), Formula::or(phi.clone(), psi.clone())),
        ),
        A::P5 { agent, r, t, phi, psi } => {
            let sum = r.checked_add(t).ok_or_else(|| AxiomError::SideCondition(format!("P5 needs r + t <= 1, got r = {r}, t = {t}")))?;
            imp(
                Formula::and(
                    Formula::prob_le(agent.clone(), r.clone(), phi.clone()),
                    Formula::prob_lt(agent.clone(), t.clone(), psi.clone()),
                ),
                Formula::prob_lt(agent.clone(), sum, Formula::or(phi.clone(), psi.clone())),
            )
        }
        A::APE { group, agent, r, phi } => {
            side(group.contains(agent), || format!("`{agent}` is not a member of the group"))?;
            imp(
                Formula::everyone_prob(group.clone(), r.clone(), phi.clone()),
                Formula::know_prob(agent.clone(), r.clone(), phi.clone()),
            )
        }
        A::APC { group, r, m, phi } => {
            imp(Formula::common_prob(group.clone(), r.clone(), phi.clone()), iterate_f(group, r, *m, phi))
        }
        A::CON { agent, phi } => {
            imp(Formula::know(agent.clone(), phi.clone()), Formula::prob(agent.clone(), Rational01::one(), phi.clone()))
        }
        A::OBJ { i, j, r, phi } => {
            imp(Formula::prob(i.clone(), r.clone(), phi.clone()), Formula::prob(j.clone(), r.clone(), phi.clone()))
        }
        A::SdpA { agent, r, phi } => {
            let p = Formula::prob(agent.clone(), r.clone(), phi.clone());
            imp(p.clone(), Formula::know(agent.clone(), p))
        }
        A::UnifA { agent, r, phi } => {
            let p = Formula::prob(agent.clone(), r.clone(), phi.clone());
            imp(p.clone(), Formula::prob(agent.clone(), Rational01::one(), p))
        }
    };
    Ok(f)
}

/// Every instance of an enabled schema that `f` is, with side conditions
/// verified.
pub fn match_axiom(f: &Formula, set: &AxiomSet) -> Vec<AxiomInstance> {
    let mut out: Vec<AxiomParams> = Vec::new();
    if tautology_check(f) {
        out.push(AxiomParams::Prop(f.clone()));
    }
    if let Formula::Prob(i, r, phi) = f {
        if r.is_zero() {
            out.push(AxiomParams::P1 { agent: i.clone(), phi: (**phi).clone() });
        }
    }
    if let Some((a, b)) = f.as_implies() {
        match_implication(a, b, &mut out);
    }
    out.into_iter()
        .filter(|p| set.allows(p.name()))
        .filter_map(|params| {
            let formula = instantiate(&params).ok()?;
            (formula == *f).then_some(AxiomInstance { params, formula })
        })
        .collect()
}

fn match_implication(a: &Formula, b: &Formula, out: &mut Vec<AxiomParams>) {
    use Formula as F;
    let one = Rational01::one();

    // FO1, FO2, FO3
    if let F::Forall(x, body) = a {
        if let Some((phi, psi)) = body.as_implies() {
            out.push(AxiomParams::FO1 { x: x.clone(), phi: phi.clone(), psi: psi.clone() });
        }
        match match_substitution(body, x, b) {
            Some(Some(t)) => out.push(AxiomParams::FO2 { x: x.clone(), phi: (**body).clone(), t }),
            Some(None) => out.push(AxiomParams::FO2 { x: x.clone(), phi: (**body).clone(), t: Term::var(x.clone()) }),
            None => {}
        }
        if let F::Know(i, phi) = body.as_ref() {
            out.push(AxiomParams::FO3 { x: x.clone(), agent: i.clone(), phi: (**phi).clone() });
        }
    }

    // AK
    if let (F::And(ka, kimp), F::Know(j, psi)) = (a, b) {
        if let (F::Know(i, phi), F::Know(i2, _)) = (ka.as_ref(), kimp.as_ref()) {
            if i == j && i2 == j {
                out.push(AxiomParams::AK { agent: i.clone(), phi: (**phi).clone(), psi: (**psi).clone() });
            }
        }
    }

    match (a, b) {
        (F::Everyone(g, phi), F::Know(i, _)) => {
            out.push(AxiomParams::AE { group: g.clone(), agent: i.clone(), phi: (**phi).clone() });
        }
        (F::Common(g, phi), _) => {
            if let Some(m) = peel_e(g, b, phi) {
                out.push(AxiomParams::AC { group: g.clone(), m, phi: (**phi).clone() });
            }
        }
        (F::EveryoneProb(g, r, phi), F::Know(i, _)) => {
            out.push(AxiomParams::APE { group: g.clone(), agent: i.clone(), r: r.clone(), phi: (**phi).clone() });
        }
        (F::CommonProb(g, r, phi), _) => {
            if let Some(m) = peel_f(g, r, b, phi) {
                out.push(AxiomParams::APC { group: g.clone(), r: r.clone(), m, phi: (**phi).clone() });
            }
        }
        (F::Know(i, phi), _) => out.push(AxiomParams::CON { agent: i.clone(), phi: (**phi).clone() }),
        _ => {}
    }

    // P2: P_{i,>=1-r} ¬φ -> ¬P_{i,>=t} φ
    if let (F::Prob(i, s, nphi), F::Not(rhs)) = (a, b) {
        if let (F::Not(phi), F::Prob(_, t, _)) = (nphi.as_ref(), rhs.as_ref()) {
            out.push(AxiomParams::P2 { agent: i.clone(), r: s.complement(), t: t.clone(), phi: (**phi).clone() });
        }
    }
    // P3: ¬P_{i,>=t} φ -> P_{i,>=1-t} ¬φ
    if let F::Not(lhs) = a {
        if let F::Prob(i, t, phi) = lhs.as_ref() {
            out.push(AxiomParams::P3 { agent: i.clone(), t: t.clone(), phi: (**phi).clone() });
        }
    }
    // P4
    if let (F::And(left, _), F::Prob(..)) = (a, b) {
        if let F::And(pa, pb) = left.as_ref() {
            if let (F::Prob(i, r, phi), F::Prob(_, t, psi)) = (pa.as_ref(), pb.as_ref()) {
                out.push(AxiomParams::P4 {
                    agent: i.clone(),
                    r: r.clone(),
                    t: t.clone(),
                    phi: (**phi).clone(),
                    psi: (**psi).clone(),
                });
            }
        }
    }
    // P5: (P_{i,>=1-r} ¬φ ∧ ¬P_{i,>=t} ψ) -> ¬P_{i,>=r+t}(φ ∨ ψ)
    if let F::And(pa, pb) = a {
        if let (F::Prob(i, s, nphi), F::Not(q)) = (pa.as_ref(), pb.as_ref()) {
            if let (F::Not(phi), F::Prob(_, t, psi)) = (nphi.as_ref(), q.as_ref()) {
                out.push(AxiomParams::P5 {
                    agent: i.clone(),
                    r: s.complement(),
                    t: t.clone(),
                    phi: (**phi).clone(),
                    psi: (**psi).clone(),
                });
            }
        }
    }
    // OBJ, SDP-A, UNIF-A
    if let F::Prob(i, r, phi) = a {
        match b {
            F::Prob(j, s, _) if s == r => {
                out.push(AxiomParams::OBJ { i: i.clone(), j: j.clone(), r: r.clone(), phi: (**phi).clone() })
            }
            _ => {}
        }
        match b {
            F::Know(..) => out.push(AxiomParams::SdpA { agent: i.clone(), r: r.clone(), phi: (**phi).clone() }),
            F::Prob(_, s, _) if *s == one => {
                out.push(AxiomParams::UnifA { agent: i.clone(), r: r.clone(), phi: (**phi).clone() })
            }
            _ => {}
        }
    }
}

enum Bool {
    Var(usize),
    Not(Box<Bool>),
    And(Box<Bool>, Box<Bool>),
}

fn to_bool<'f>(f: &'f Formula, atoms: &mut HashMap<&'f Formula, usize>) -> Bool {
    match f {
        Formula::Not(g) => Bool::Not(Box::new(to_bool(g, atoms))),
        Formula::And(a, b) => Bool::And(Box::new(to_bool(a, atoms)), Box::new(to_bool(b, atoms))),
        _ => {
            let next = atoms.len();
            Bool::Var(*atoms.entry(f).or_insert(next))
        }
    }
}

/// Kleene evaluation under a partial assignment.
fn kleene(b: &Bool, assign: &[Option<bool>]) -> Option<bool> {
    match b {
        Bool::Var(v) => assign[*v],
        Bool::Not(x) => kleene(x, assign).map(|v| !v),
        Bool::And(x, y) => match (kleene(x, assign), kleene(y, assign)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
    }
}

fn all_true(b: &Bool, assign: &mut Vec<Option<bool>>, next: usize) -> bool {
    match kleene(b, assign) {
        Some(v) => v,
        None => {
            let var = (next..assign.len()).find(|&v| assign[v].is_none()).expect("undetermined value has a free atom");
            let mut ok = true;
            for value in [true, false] {
                assign[var] = Some(value);
                if !all_true(b, assign, var + 1) {
                    ok = false;
                    break;
                }
            }
            assign[var] = None;
            ok
        }
    }
}

/// True iff `f` is a propositional tautology over its maximal subformulas
/// not headed by `!` or `&`.
pub fn tautology_check(f: &Formula) -> bool {
    let mut atoms = HashMap::new();
    let b = to_bool(f, &mut atoms);
    let mut assign = vec![None; atoms.len()];
    all_true(&b, &mut assign, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn names(f: &Formula, set: &AxiomSet) -> Vec<AxiomName> {
        match_axiom(f, set).into_iter().map(|i| i.name()).collect()
    }

    #[test]
    fn p1_instance() {
        assert_eq!(names(&p("P[i]>=0 psi"), &AxiomSet::plain()), vec![AxiomName::P1]);
    }

    #[test]
    fn barcan_instance() {
        let f = p("forall x K[i] R(x) -> K[i] forall x R(x)");
        assert!(names(&f, &AxiomSet::plain()).contains(&AxiomName::FO3));
    }

    #[test]
    fn con_only_when_enabled() {
        let f = p("K[i] phi -> P[i]>=1 phi");
        assert_eq!(names(&f, &AxiomSet::with_con()), vec![AxiomName::CON]);
        assert!(names(&f, &AxiomSet::plain()).is_empty());
    }

    #[test]
    fn instantiation_examples() {
        let phi = p("phi");
        let f = instantiate(&AxiomParams::P2 {
            agent: "i".into(),
            r: Rational01::frac(1, 2),
            t: Rational01::frac(3, 4),
            phi: phi.clone(),
        })
        .unwrap();
        assert_eq!(f, p("P[i]<=1/2 phi -> P[i]<3/4 phi"));
        let g = Group::of(&["G"]);
        let f = instantiate(&AxiomParams::AC { group: g, m: 2, phi: phi.clone() }).unwrap();
        assert_eq!(f, p("C{G} phi -> E{G} E{G} phi"));
        let bad = AxiomParams::P5 {
            agent: "i".into(),
            r: Rational01::frac(2, 3),
            t: Rational01::frac(1, 2),
            phi: phi.clone(),
            psi: p("psi"),
        };
        assert!(matches!(instantiate(&bad), Err(AxiomError::SideCondition(_))));
    }

    #[test]
    fn tautologies() {
        assert!(tautology_check(&p("phi | !phi")));
        assert!(tautology_check(&p("K[i] phi -> K[i] phi")));
        assert!(!tautology_check(&p("K[i] (phi | !phi)")));
        assert!(tautology_check(&p("(a -> (b -> c)) <-> (a & b -> c)")));
        assert!(!tautology_check(&p("a -> b")));
    }

    #[test]
    fn side_conditions_block_matches() {
        // x free in the antecedent: not FO1
        let f = p("forall x (R(x) -> S(x)) -> (R(x) -> forall x S(x))");
        assert!(!names(&f, &AxiomSet::plain()).contains(&AxiomName::FO1));
        let ok = p("forall x (q -> S(x)) -> (q -> forall x S(x))");
        assert!(names(&ok, &AxiomSet::plain()).contains(&AxiomName::FO1));
        // capture: forall x forall y R(x, y) -> forall y R(y, y)
        let f = p("forall x forall y R(x, y) -> forall y R(y, y)");
        assert!(!names(&f, &AxiomSet::plain()).contains(&AxiomName::FO2));
        let f = p("forall x forall y R(x, y) -> forall y R(c, y)");
        assert!(names(&f, &AxiomSet::plain()).contains(&AxiomName::FO2));
        // AE needs membership
        assert!(names(&p("E{a,b} p -> K[a] p"), &AxiomSet::plain()).contains(&AxiomName::AE));
        assert!(names(&p("E{a,b} p -> K[c] p"), &AxiomSet::plain()).is_empty());
        // P2 needs t > r
        assert!(names(&p("P[i]<=1/2 p -> P[i]<1/2 p"), &AxiomSet::plain()).is_empty());
    }
}
