//! Terms, formulas and the syntactic operations on them.
//!
//! Only the primitive connectives are stored: negation, conjunction, the
//! universal quantifier, `K_i`, `E_G`, `C_G`, `P_{i,>=r}`, `E_G^r` and
//! `C_G^r`. Everything else (implication, disjunction, `exists`, the other
//! probability comparisons, `K_i^r`, truth constants) is built by the
//! constructor helpers here and never appears as its own node. Formula
//! identity is plain structural equality; there is no alpha-renaming.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::rational::Rational01;

/// Reserved nullary relation used to spell the truth constants.
pub const FALSUM: &str = "falsum";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("term `{term}` is not free for `{var}`: it would be captured by a quantifier")]
    Capture { term: String, var: String },
    #[error("unknown abbreviation `{0}`")]
    UnknownAbbreviation(String),
    #[error("abbreviation `{name}` expects {expected}")]
    AbbreviationArgs { name: String, expected: &'static str },
    #[error("nested implication needs {expected} antecedents for {ops} operators, got {found}")]
    NestedLength { expected: usize, ops: usize, found: usize },
    #[error("iterated group knowledge is defined from exponent 1")]
    ZeroExponent,
    #[error("group must be nonempty and duplicate-free")]
    BadGroup,
}

/// An agent name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Self {
        AgentId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(name: &str) -> Self {
        AgentId(name.to_string())
    }
}

/// A nonempty, duplicate-free, ordered list of member names.
///
/// A member may be an agent or, when evaluated against a model, the name of
/// one of the model's declared groups; the evaluator resolves the latter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Group(Vec<AgentId>);

impl Group {
    pub fn new(members: Vec<AgentId>) -> Result<Self, SyntaxError> {
        let distinct: BTreeSet<_> = members.iter().collect();
        if members.is_empty() || distinct.len() != members.len() {
            return Err(SyntaxError::BadGroup);
        }
        Ok(Group(members))
    }

    /// Panicking shorthand for tests and generators.
    pub fn of(members: &[&str]) -> Self {
        Group::new(members.iter().map(|m| AgentId::new(*m)).collect()).expect("bad group literal")
    }

    pub fn members(&self) -> &[AgentId] {
        &self.0
    }

    pub fn contains(&self, agent: &AgentId) -> bool {
        self.0.contains(agent)
    }
}

pub type Var = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// Function application; constants are nullary applications.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    fn substitute(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => by.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(var, by)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// `K_i φ`
    Know(AgentId, Box<Formula>),
    /// `E_G φ`
    Everyone(Group, Box<Formula>),
    /// `C_G φ`
    Common(Group, Box<Formula>),
    /// `P_{i,>=r} φ`
    Prob(AgentId, Rational01, Box<Formula>),
    /// `E_G^r φ`
    EveryoneProb(Group, Rational01, Box<Formula>),
    /// `C_G^r φ`
    CommonProb(Group, Rational01, Box<Formula>),
}

/// Primitive and derived constructors.
impl Formula {
    pub fn atom(rel: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(rel.into(), args)
    }

    /// Nullary atom.
    pub fn prop(rel: impl Into<String>) -> Self {
        Formula::Atom(rel.into(), Vec::new())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, f: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(f))
    }

    pub fn know(agent: impl Into<AgentId>, f: Formula) -> Self {
        Formula::Know(agent.into(), Box::new(f))
    }

    pub fn everyone(group: Group, f: Formula) -> Self {
        Formula::Everyone(group, Box::new(f))
    }

    pub fn common(group: Group, f: Formula) -> Self {
        Formula::Common(group, Box::new(f))
    }

    pub fn prob(agent: impl Into<AgentId>, r: Rational01, f: Formula) -> Self {
        Formula::Prob(agent.into(), r, Box::new(f))
    }

    pub fn everyone_prob(group: Group, r: Rational01, f: Formula) -> Self {
        Formula::EveryoneProb(group, r, Box::new(f))
    }

    pub fn common_prob(group: Group, r: Rational01, f: Formula) -> Self {
        Formula::CommonProb(group, r, Box::new(f))
    }

    /// `a -> b`, stored as `!(a & !b)`.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    /// `a | b`, stored as `!(!a & !b)`.
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a <-> b`, stored as `(a -> b) & (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    /// `exists x φ`, stored as `!forall x !φ`.
    pub fn exists(var: impl Into<String>, f: Formula) -> Self {
        Formula::not(Formula::forall(var, Formula::not(f)))
    }

    /// `⊥`, stored as `falsum & !falsum`.
    pub fn bot() -> Self {
        Formula::and(Formula::prop(FALSUM), Formula::not(Formula::prop(FALSUM)))
    }

    /// `⊤`, stored as `!(falsum & !falsum)`.
    pub fn top() -> Self {
        Formula::not(Formula::bot())
    }

    /// `P_{i,<r} φ = ¬P_{i,>=r} φ`
    pub fn prob_lt(agent: impl Into<AgentId>, r: Rational01, f: Formula) -> Self {
        Formula::not(Formula::prob(agent, r, f))
    }

    /// `P_{i,<=r} φ = P_{i,>=1-r} ¬φ`
    pub fn prob_le(agent: impl Into<AgentId>, r: Rational01, f: Formula) -> Self {
        Formula::prob(agent, r.complement(), Formula::not(f))
    }

    /// `P_{i,>r} φ = ¬P_{i,<=r} φ`
    pub fn prob_gt(agent: impl Into<AgentId>, r: Rational01, f: Formula) -> Self {
        Formula::not(Formula::prob_le(agent, r, f))
    }

    /// `P_{i,=r} φ = P_{i,<=r} φ ∧ P_{i,>=r} φ`
    pub fn prob_eq(agent: impl Into<AgentId>, r: Rational01, f: Formula) -> Self {
        let agent = agent.into();
        Formula::and(Formula::prob_le(agent.clone(), r.clone(), f.clone()), Formula::prob(agent, r, f))
    }

    /// `K_i^r φ = K_i(P_{i,>=r} φ)`
    pub fn know_prob(agent: impl Into<AgentId>, r: Rational01, f: Formula) -> Self {
        let agent = agent.into();
        Formula::know(agent.clone(), Formula::prob(agent, r, f))
    }
}

/// Shape recognizers for the derived connectives.
impl Formula {
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::And(a, nb) => match nb.as_ref() {
                    Formula::Not(b) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::And(na, nb) => match (na.as_ref(), nb.as_ref()) {
                    (Formula::Not(a), Formula::Not(b)) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::And(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_not(&self) -> Option<&Formula> {
        match self {
            Formula::Not(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        *self == Formula::top()
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().map(Formula::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().map(Formula::depth).max().unwrap_or(0)
    }

    pub fn children(&self) -> impl Iterator<Item = &Formula> {
        let (first, second): (Option<&Formula>, Option<&Formula>) = match self {
            Formula::Atom(..) => (None, None),
            Formula::And(a, b) => (Some(a), Some(b)),
            Formula::Not(f)
            | Formula::Forall(_, f)
            | Formula::Know(_, f)
            | Formula::Everyone(_, f)
            | Formula::Common(_, f)
            | Formula::Prob(_, _, f)
            | Formula::EveryoneProb(_, _, f)
            | Formula::CommonProb(_, _, f) => (Some(f), None),
        };
        first.into_iter().chain(second)
    }
}

/// Variables with at least one free occurrence.
pub fn free_vars(f: &Formula) -> BTreeSet<Var> {
    fn walk(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match f {
            Formula::Atom(_, args) => {
                for v in args.iter().flat_map(Term::vars) {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Forall(x, body) => {
                bound.push(x.clone());
                walk(body, bound, out);
                bound.pop();
            }
            _ => f.children().for_each(|c| walk(c, bound, out)),
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

pub fn is_sentence(f: &Formula) -> bool {
    free_vars(f).is_empty()
}

/// True iff no free occurrence of `x` in `f` sits under a quantifier that
/// binds a variable of `t`.
pub fn is_free_for(t: &Term, x: &str, f: &Formula) -> bool {
    fn walk(f: &Formula, x: &str, tvars: &BTreeSet<Var>, under_capture: bool) -> bool {
        match f {
            Formula::Atom(_, args) => !under_capture || !args.iter().any(|a| a.vars().contains(x)),
            Formula::Forall(y, body) => {
                if y == x {
                    // x is bound below; no free occurrences in this subtree
                    true
                } else {
                    walk(body, x, tvars, under_capture || tvars.contains(y))
                }
            }
            _ => f.children().all(|c| walk(c, x, tvars, under_capture)),
        }
    }
    walk(f, x, &t.vars(), false)
}

/// Replaces every free occurrence of `x` in `f` by `t`.
pub fn substitute(f: &Formula, x: &str, t: &Term) -> Result<Formula, SyntaxError> {
    if !is_free_for(t, x, f) {
        return Err(SyntaxError::Capture { term: crate::parser::print_term(t), var: x.to_string() });
    }
    Ok(substitute_unchecked(f, x, t))
}

fn substitute_unchecked(f: &Formula, x: &str, t: &Term) -> Formula {
    let sub = |g: &Formula| Box::new(substitute_unchecked(g, x, t));
    match f {
        Formula::Atom(rel, args) => Formula::Atom(rel.clone(), args.iter().map(|a| a.substitute(x, t)).collect()),
        Formula::Not(g) => Formula::Not(sub(g)),
        Formula::And(a, b) => Formula::And(sub(a), sub(b)),
        Formula::Forall(y, _) if y == x => f.clone(),
        Formula::Forall(y, g) => Formula::Forall(y.clone(), sub(g)),
        Formula::Know(i, g) => Formula::Know(i.clone(), sub(g)),
        Formula::Everyone(gr, g) => Formula::Everyone(gr.clone(), sub(g)),
        Formula::Common(gr, g) => Formula::Common(gr.clone(), sub(g)),
        Formula::Prob(i, r, g) => Formula::Prob(i.clone(), r.clone(), sub(g)),
        Formula::EveryoneProb(gr, r, g) => Formula::EveryoneProb(gr.clone(), r.clone(), sub(g)),
        Formula::CommonProb(gr, r, g) => Formula::CommonProb(gr.clone(), r.clone(), sub(g)),
    }
}

/// Finds the term `t` with `substitute(pattern, x, t) == target`.
///
/// Returns `Some(None)` when `x` has no free occurrence in `pattern` and the
/// two formulas are identical (any term works), `Some(Some(t))` for the
/// unique witness, and `None` when `target` is not an instance.
pub fn match_substitution(pattern: &Formula, x: &str, target: &Formula) -> Option<Option<Term>> {
    fn terms(p: &Term, t: &Term, x: &str, found: &mut Option<Term>) -> bool {
        match (p, t) {
            (Term::Var(v), _) if v == x => match found {
                Some(prev) => prev == t,
                None => {
                    *found = Some(t.clone());
                    true
                }
            },
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::App(f, ps), Term::App(g, ts)) => {
                f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| terms(p, t, x, found))
            }
            _ => false,
        }
    }
    fn walk(p: &Formula, t: &Formula, x: &str, found: &mut Option<Term>) -> bool {
        match (p, t) {
            (Formula::Atom(r, ps), Formula::Atom(s, ts)) => {
                r == s && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| terms(p, t, x, found))
            }
            (Formula::Not(a), Formula::Not(b)) => walk(a, b, x, found),
            (Formula::And(a1, a2), Formula::And(b1, b2)) => walk(a1, b1, x, found) && walk(a2, b2, x, found),
            (Formula::Forall(y, a), Formula::Forall(z, b)) => {
                y == z && if y == x { a == b } else { walk(a, b, x, found) }
            }
            (Formula::Know(i, a), Formula::Know(j, b)) => i == j && walk(a, b, x, found),
            (Formula::Everyone(g, a), Formula::Everyone(h, b)) | (Formula::Common(g, a), Formula::Common(h, b)) => {
                g == h && walk(a, b, x, found)
            }
            (Formula::Prob(i, r, a), Formula::Prob(j, s, b)) => i == j && r == s && walk(a, b, x, found),
            (Formula::EveryoneProb(g, r, a), Formula::EveryoneProb(h, s, b))
            | (Formula::CommonProb(g, r, a), Formula::CommonProb(h, s, b)) => {
                g == h && r == s && walk(a, b, x, found)
            }
            _ => false,
        }
    }
    let mut found = None;
    walk(pattern, target, x, &mut found).then_some(found)
}

/// Arguments to [`expand_abbrev`]; each abbreviation reads the fields it needs.
#[derive(Debug, Clone, Default)]
pub struct AbbrevArgs {
    pub formulas: Vec<Formula>,
    pub agent: Option<AgentId>,
    pub threshold: Option<Rational01>,
    pub var: Option<Var>,
}

/// Expands a named abbreviation into primitive syntax.
///
/// Names: `implies`, `or`, `iff`, `exists`, `top`, `bot`, `P<`, `P<=`, `P>`,
/// `P=`, `Kr`.
pub fn expand_abbrev(name: &str, args: AbbrevArgs) -> Result<Formula, SyntaxError> {
    let bad = |expected| SyntaxError::AbbreviationArgs { name: name.to_string(), expected };
    let mut fs = args.formulas.into_iter();
    let mut next = |expected| fs.next().ok_or_else(|| bad(expected));
    let out = match name {
        "implies" | "or" | "iff" => {
            let a = next("two formulas")?;
            let b = next("two formulas")?;
            match name {
                "implies" => Formula::implies(a, b),
                "or" => Formula::or(a, b),
                _ => Formula::iff(a, b),
            }
        }
        "exists" => {
            let x = args.var.ok_or_else(|| bad("a variable and a formula"))?;
            Formula::exists(x, next("a variable and a formula")?)
        }
        "top" => Formula::top(),
        "bot" => Formula::bot(),
        "P<" | "P<=" | "P>" | "P=" | "Kr" => {
            let expected = "an agent, a threshold and a formula";
            let agent = args.agent.ok_or_else(|| bad(expected))?;
            let r = args.threshold.ok_or_else(|| bad(expected))?;
            let f = next(expected)?;
            match name {
                "P<" => Formula::prob_lt(agent, r, f),
                "P<=" => Formula::prob_le(agent, r, f),
                "P>" => Formula::prob_gt(agent, r, f),
                "P=" => Formula::prob_eq(agent, r, f),
                _ => Formula::know_prob(agent, r, f),
            }
        }
        other => return Err(SyntaxError::UnknownAbbreviation(other.to_string())),
    };
    Ok(out)
}

/// One operator of a nested implication: `K_i` or `P_{i,>=1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NestOp {
    Know(AgentId),
    ProbOne(AgentId),
}

impl NestOp {
    pub fn apply(&self, f: Formula) -> Formula {
        match self {
            NestOp::Know(i) => Formula::know(i.clone(), f),
            NestOp::ProbOne(i) => Formula::prob(i.clone(), Rational01::one(), f),
        }
    }

    /// Inverse of [`NestOp::apply`].
    pub fn peel(f: &Formula) -> Option<(NestOp, &Formula)> {
        match f {
            Formula::Know(i, g) => Some((NestOp::Know(i.clone()), g)),
            Formula::Prob(i, r, g) if r.is_one() => Some((NestOp::ProbOne(i.clone()), g)),
            _ => None,
        }
    }
}

/// The antecedents `θ_0..θ_k` and operators `X_1..X_k` of a k-nested
/// implication `θ_k -> X_k(θ_{k-1} -> ... X_1(θ_0 -> τ))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NestedSpec {
    pub thetas: Vec<Formula>,
    pub ops: Vec<NestOp>,
}

impl NestedSpec {
    /// `k = 0`, `θ_0 = ⊤`: the plain form of every infinitary rule.
    pub fn trivial() -> Self {
        NestedSpec { thetas: vec![Formula::top()], ops: Vec::new() }
    }

    pub fn k(&self) -> usize {
        self.ops.len()
    }

    pub fn check(&self) -> Result<(), SyntaxError> {
        if self.thetas.len() != self.ops.len() + 1 {
            return Err(SyntaxError::NestedLength {
                expected: self.ops.len() + 1,
                ops: self.ops.len(),
                found: self.thetas.len(),
            });
        }
        Ok(())
    }

    /// Reads off the spec of depth `k` from a formula of that shape,
    /// returning it together with the innermost consequent `τ`.
    pub fn infer(k: usize, f: &Formula) -> Option<(NestedSpec, &Formula)> {
        let mut thetas = Vec::with_capacity(k + 1);
        let mut ops = Vec::with_capacity(k);
        let mut cur = f;
        for _ in 0..k {
            let (theta, rest) = cur.as_implies()?;
            let (op, inner) = NestOp::peel(rest)?;
            thetas.push(theta.clone());
            ops.push(op);
            cur = inner;
        }
        let (theta0, tau) = cur.as_implies()?;
        thetas.push(theta0.clone());
        thetas.reverse();
        ops.reverse();
        Some((NestedSpec { thetas, ops }, tau))
    }

    /// The consequent `τ` if `f == nested_implication(self, τ)`.
    pub fn unwrap<'f>(&self, f: &'f Formula) -> Option<&'f Formula> {
        let (spec, tau) = NestedSpec::infer(self.k(), f)?;
        (spec == *self).then_some(tau)
    }

    /// Replaces the outermost antecedent `θ_k` by `φ ∧ θ_k`.
    pub fn strengthen_outer(&self, phi: &Formula) -> NestedSpec {
        let mut out = self.clone();
        let last = out.thetas.last_mut().expect("nonempty thetas");
        *last = Formula::and(phi.clone(), last.clone());
        out
    }

    /// Wraps one more level: `θ_{k+1} = ⊤`, `X_{k+1} = K_i`.
    pub fn extend_know(&self, agent: &AgentId) -> NestedSpec {
        let mut out = self.clone();
        out.thetas.push(Formula::top());
        out.ops.push(NestOp::Know(agent.clone()));
        out
    }
}

pub fn nested_implication(spec: &NestedSpec, tau: Formula) -> Result<Formula, SyntaxError> {
    spec.check()?;
    let mut acc = Formula::implies(spec.thetas[0].clone(), tau);
    for (theta, op) in spec.thetas[1..].iter().zip(&spec.ops) {
        acc = Formula::implies(theta.clone(), op.apply(acc));
    }
    Ok(acc)
}

/// `(E_G)^m φ` for `m >= 1`.
pub fn iterate_e(group: &Group, m: u32, f: Formula) -> Result<Formula, SyntaxError> {
    if m == 0 {
        return Err(SyntaxError::ZeroExponent);
    }
    Ok((0..m).fold(f, |acc, _| Formula::everyone(group.clone(), acc)))
}

/// `(F_G^r)^m φ`: `⊤` for `m = 0`, else `E_G^r(φ ∧ (F_G^r)^{m-1} φ)`.
pub fn iterate_f(group: &Group, r: &Rational01, m: u32, f: &Formula) -> Formula {
    (0..m).fold(Formula::top(), |acc, _| Formula::everyone_prob(group.clone(), r.clone(), Formula::and(f.clone(), acc)))
}

/// Number of leading `E_G` layers around `body`, if `f = (E_G)^m body`, `m >= 1`.
pub fn peel_e<'f>(group: &Group, f: &'f Formula, body: &Formula) -> Option<u32> {
    let mut cur = f;
    let mut m = 0;
    while let Formula::Everyone(g, inner) = cur {
        if g != group {
            break;
        }
        m += 1;
        cur = inner;
        if cur == body {
            return Some(m);
        }
    }
    None
}

/// `m` with `f = (F_G^r)^m body`.
pub fn peel_f(group: &Group, r: &Rational01, f: &Formula, body: &Formula) -> Option<u32> {
    let mut cur = f;
    let mut m = 0;
    loop {
        if cur.is_top() {
            return Some(m);
        }
        match cur {
            Formula::EveryoneProb(g, s, inner) if g == group && s == r => {
                let (head, rest) = inner.as_and()?;
                if head != body {
                    return None;
                }
                m += 1;
                cur = rest;
            }
            _ => return None,
        }
    }
}
