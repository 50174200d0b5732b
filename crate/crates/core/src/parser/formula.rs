//! Concrete formula syntax.
//!
//! ```text
//! formula  ::= iff
//! iff      ::= imp ( "<->" imp )*              left associative
//! imp      ::= or ( "->" imp )?                right associative
//! or       ::= and ( "|" and )*
//! and      ::= unary ( "&" unary )*
//! unary    ::= "!" unary
//!            | ("forall" | "exists") var unary
//!            | "K[" agent "]" unary
//!            | "Kr[" agent "," rational "]" unary
//!            | "P[" agent "]" cmp rational unary      cmp ::= ">=" | "<=" | ">" | "<" | "="
//!            | ("E" | "C") "{" members "}" unary
//!            | ("Es" | "Cs") "{" members "," rational "}" unary
//!            | primary
//! primary  ::= "true" | "false" | "(" formula ")" | ident ( "(" terms ")" )?
//! term     ::= var | ident "(" terms? ")" | ident
//! var      ::= "?" ident | ident starting with one of u v w x y z
//! rational ::= digits ( "/" digits | "." digits )?
//! ```
//!
//! A bare identifier in term position is a variable when it starts with a
//! lowercase `u`..`z` and a constant otherwise; `?name` forces a variable
//! and `name()` forces a constant. Derived connectives are expanded while
//! parsing, so [`print_formula`] only ever emits `!`, `&`, `forall` and the
//! primitive modal operators.

use std::collections::HashMap;

use crate::rational::Rational01;
use crate::syntax::{AgentId, Formula, Group, Term};

use super::{ParseError, SourceSpan};

/// Nesting limit for parsed formulas; evaluation recurses on formula depth.
pub const MAX_DEPTH: usize = 400;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Question,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Question => "?",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::DoubleArrow => "<->",
            Tok::Ge => ">=",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Lt => "<",
            Tok::Eq => "=",
            _ => "",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |s: &str| text[i..].starts_with(s);
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/' || bytes[i] == b'.') {
                i += 1;
            }
            Tok::Number(text[start..i].to_string())
        } else if two("<->") {
            i += 3;
            Tok::DoubleArrow
        } else if two("->") {
            i += 2;
            Tok::Arrow
        } else if two(">=") {
            i += 2;
            Tok::Ge
        } else if two("<=") {
            i += 2;
            Tok::Le
        } else {
            i += 1;
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b',' => Tok::Comma,
                b'?' => Tok::Question,
                b'!' => Tok::Bang,
                b'&' => Tok::Amp,
                b'|' => Tok::Pipe,
                b'>' => Tok::Gt,
                b'<' => Tok::Lt,
                b'=' => Tok::Eq,
                _ => {
                    let end = start + text[start..].chars().next().map_or(1, char::len_utf8);
                    return Err(ParseError::Syntax {
                        message: format!("unexpected character `{}`", &text[start..end]),
                        span: SourceSpan::new(start, end),
                    });
                }
            }
        };
        out.push((tok, SourceSpan::new(start, i)));
    }
    out.push((Tok::Eof, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

const RESERVED: &[&str] = &["forall", "exists", "true", "false"];

fn lexes_as_var(name: &str) -> bool {
    name.starts_with(['u', 'v', 'w', 'x', 'y', 'z'])
}

fn is_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

struct Parser<'t> {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    depth: usize,
    /// symbol -> (arity, first use) for relation and function symbols
    arities: HashMap<(bool, String), (usize, SourceSpan)>,
    _text: &'t str,
}

type PResult<T> = Result<T, ParseError>;

impl<'t> Parser<'t> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.toks[(self.pos + ahead).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { message: message.into(), span: self.span() })
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected `{}`, found {}", tok.symbol(), self.peek().describe()))
        }
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if *self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected {what}, found {}", other.describe())),
        }
    }

    fn rational(&mut self) -> PResult<Rational01> {
        match self.peek().clone() {
            Tok::Number(text) => {
                let span = self.span();
                self.bump();
                text.parse().map_err(|source| ParseError::Rational { source, span })
            }
            other => self.error(format!("expected a rational threshold, found {}", other.describe())),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error(format!("formula nesting exceeds {MAX_DEPTH} levels"));
        }
        Ok(())
    }

    fn record_arity(&mut self, is_fn: bool, name: &str, arity: usize, span: SourceSpan) -> PResult<()> {
        match self.arities.get(&(is_fn, name.to_string())) {
            Some((prev, _)) if *prev != arity => Err(ParseError::Arity {
                symbol: name.to_string(),
                expected: *prev,
                found: arity,
                span,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert((is_fn, name.to_string()), (arity, span));
                Ok(())
            }
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        self.enter()?;
        let mut lhs = self.implication()?;
        while self.eat(Tok::DoubleArrow) {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(Tok::Arrow) {
            self.enter()?;
            let rhs = self.implication()?;
            self.depth -= 1;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(Tok::Pipe) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(Tok::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn bracket_agent(&mut self) -> PResult<AgentId> {
        self.expect(Tok::LBracket)?;
        let agent = AgentId(self.ident("an agent name")?);
        Ok(agent)
    }

    /// `{ m1, m2, ... [, r] }`
    fn braced_group(&mut self, with_threshold: bool) -> PResult<(Group, Option<Rational01>)> {
        let open = self.expect(Tok::LBrace)?;
        let mut members = Vec::new();
        let mut threshold = None;
        loop {
            if with_threshold && matches!(self.peek(), Tok::Number(_)) {
                threshold = Some(self.rational()?);
                break;
            }
            members.push(AgentId(self.ident("a group member")?));
            if !self.eat(Tok::Comma) {
                break;
            }
        }
        if with_threshold && threshold.is_none() {
            return self.error("expected `, threshold` after the group members");
        }
        self.expect(Tok::RBrace)?;
        let group = Group::new(members).map_err(|_| ParseError::Syntax {
            message: "group members must be nonempty and distinct".to_string(),
            span: open,
        })?;
        Ok((group, threshold))
    }

    fn unary(&mut self) -> PResult<Formula> {
        self.enter()?;
        let out = self.unary_inner()?;
        self.depth -= 1;
        Ok(out)
    }

    fn unary_inner(&mut self) -> PResult<Formula> {
        let opening = matches!(self.peek_at(1), Tok::LBracket | Tok::LBrace);
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let var = self.binder()?;
                let body = self.unary()?;
                Ok(if kw == "forall" { Formula::forall(var, body) } else { Formula::exists(var, body) })
            }
            Tok::Ident(op) if opening && op == "K" => {
                self.bump();
                let agent = self.bracket_agent()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::know(agent, self.unary()?))
            }
            Tok::Ident(op) if opening && op == "Kr" => {
                self.bump();
                let agent = self.bracket_agent()?;
                self.expect(Tok::Comma)?;
                let r = self.rational()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::know_prob(agent, r, self.unary()?))
            }
            Tok::Ident(op) if opening && op == "P" => {
                self.bump();
                let agent = self.bracket_agent()?;
                self.expect(Tok::RBracket)?;
                let cmp = self.bump();
                let r = self.rational()?;
                let body = self.unary()?;
                match cmp.0 {
                    Tok::Ge => Ok(Formula::prob(agent, r, body)),
                    Tok::Le => Ok(Formula::prob_le(agent, r, body)),
                    Tok::Gt => Ok(Formula::prob_gt(agent, r, body)),
                    Tok::Lt => Ok(Formula::prob_lt(agent, r, body)),
                    Tok::Eq => Ok(Formula::prob_eq(agent, r, body)),
                    other => Err(ParseError::Syntax {
                        message: format!("expected a comparison after P[..], found {}", other.describe()),
                        span: cmp.1,
                    }),
                }
            }
            Tok::Ident(op) if opening && (op == "E" || op == "C") => {
                self.bump();
                let (group, _) = self.braced_group(false)?;
                let body = self.unary()?;
                Ok(if op == "E" { Formula::everyone(group, body) } else { Formula::common(group, body) })
            }
            Tok::Ident(op) if opening && (op == "Es" || op == "Cs") => {
                self.bump();
                let (group, r) = self.braced_group(true)?;
                let r = r.expect("threshold checked");
                let body = self.unary()?;
                Ok(if op == "Es" {
                    Formula::everyone_prob(group, r, body)
                } else {
                    Formula::common_prob(group, r, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn binder(&mut self) -> PResult<String> {
        if self.eat(Tok::Question) {
            return self.ident("a variable name");
        }
        let span = self.span();
        let name = self.ident("a variable")?;
        if !lexes_as_var(&name) {
            return Err(ParseError::Syntax {
                message: format!("`{name}` is not a variable name (variables start with u-z or use `?name`)"),
                span,
            });
        }
        Ok(name)
    }

    fn primary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "true" => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::Ident(kw) if kw == "false" => {
                self.bump();
                Ok(Formula::bot())
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => {
                let span = self.span();
                let rel = self.ident("a relation symbol")?;
                let args = if *self.peek() == Tok::LParen { self.term_list()? } else { Vec::new() };
                self.record_arity(false, &rel, args.len(), span)?;
                Ok(Formula::atom(rel, args))
            }
            other => self.error(format!("expected a formula, found {}", other.describe())),
        }
    }

    fn term_list(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.eat(Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if !self.eat(Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn term(&mut self) -> PResult<Term> {
        self.enter()?;
        let out = if self.eat(Tok::Question) {
            Term::Var(self.ident("a variable name")?)
        } else {
            let span = self.span();
            let name = self.ident("a term")?;
            if *self.peek() == Tok::LParen {
                let args = self.term_list()?;
                self.record_arity(true, &name, args.len(), span)?;
                Term::App(name, args)
            } else if lexes_as_var(&name) {
                Term::Var(name)
            } else {
                self.record_arity(true, &name, 0, span)?;
                Term::constant(name)
            }
        };
        self.depth -= 1;
        Ok(out)
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, depth: 0, arities: HashMap::new(), _text: text };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after formula", p.peek().describe()));
    }
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, depth: 0, arities: HashMap::new(), _text: text };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after term", p.peek().describe()));
    }
    Ok(t)
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) if lexes_as_var(v) && is_ident(v) => out.push_str(v),
        Term::Var(v) => {
            out.push('?');
            out.push_str(v);
        }
        Term::App(f, args) => {
            out.push_str(f);
            if !args.is_empty() || lexes_as_var(f) {
                out.push('(');
                for (n, a) in args.iter().enumerate() {
                    if n > 0 {
                        out.push_str(", ");
                    }
                    write_term(a, out);
                }
                out.push(')');
            }
        }
    }
}

/// Prints `f` in primitive syntax; `parse_formula(&print_formula(f)) == f`.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, false, &mut out);
    out
}

fn write_members(g: &Group, out: &mut String) {
    for (n, m) in g.members().iter().enumerate() {
        if n > 0 {
            out.push(',');
        }
        out.push_str(m.as_str());
    }
}

/// Writes an operand of a prefix operator: conjunctions need parentheses.
fn write_operand(f: &Formula, out: &mut String) {
    if matches!(f, Formula::And(..)) {
        out.push('(');
        write_formula(f, false, out);
        out.push(')');
    } else {
        out.push(' ');
        write_formula(f, false, out);
    }
}

fn write_formula(f: &Formula, right_of_and: bool, out: &mut String) {
    match f {
        Formula::Atom(rel, args) => {
            out.push_str(rel);
            if !args.is_empty() {
                out.push('(');
                for (n, a) in args.iter().enumerate() {
                    if n > 0 {
                        out.push_str(", ");
                    }
                    write_term(a, out);
                }
                out.push(')');
            }
        }
        Formula::Not(g) => {
            out.push('!');
            if matches!(g.as_ref(), Formula::And(..)) {
                out.push('(');
                write_formula(g, false, out);
                out.push(')');
            } else {
                write_formula(g, false, out);
            }
        }
        Formula::And(a, b) => {
            if right_of_and {
                out.push('(');
            }
            write_formula(a, false, out);
            out.push_str(" & ");
            write_formula(b, true, out);
            if right_of_and {
                out.push(')');
            }
        }
        Formula::Forall(x, g) => {
            out.push_str("forall ");
            if lexes_as_var(x) && is_ident(x) {
                out.push_str(x);
            } else {
                out.push('?');
                out.push_str(x);
            }
            write_operand(g, out);
        }
        Formula::Know(i, g) => {
            out.push_str(&format!("K[{i}]"));
            write_operand(g, out);
        }
        Formula::Everyone(gr, g) | Formula::Common(gr, g) => {
            out.push_str(if matches!(f, Formula::Everyone(..)) { "E{" } else { "C{" });
            write_members(gr, out);
            out.push('}');
            write_operand(g, out);
        }
        Formula::Prob(i, r, g) => {
            out.push_str(&format!("P[{i}]>={r}"));
            write_operand(g, out);
        }
        Formula::EveryoneProb(gr, r, g) | Formula::CommonProb(gr, r, g) => {
            out.push_str(if matches!(f, Formula::EveryoneProb(..)) { "Es{" } else { "Cs{" });
            write_members(gr, out);
            out.push_str(&format!(",{r}}}"));
            write_operand(g, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Formula as F;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn group_knowledge_example() {
        let g = Group::of(&["G"]);
        let expected = F::everyone(
            g.clone(),
            F::implies(F::not(F::know("i", F::prop("phi"))), F::common(g, F::prop("psi"))),
        );
        assert_eq!(p("E{G}(!K[i] phi -> C{G} psi)"), expected);
    }

    #[test]
    fn probability_operator() {
        assert_eq!(p("P[i]>=0 phi"), F::prob("i", Rational01::zero(), F::prop("phi")));
        assert_eq!(print_formula(&p("P[i]>=0 phi")), "P[i]>=0 phi");
    }

    #[test]
    fn probabilistic_group_example() {
        let g = Group::of(&["G"]);
        let phi_x = F::atom("phi", vec![Term::var("x")]);
        let expected = F::everyone_prob(
            g.clone(),
            Rational01::frac(1, 2),
            F::and(
                F::know("i", F::exists("x", phi_x)),
                F::not(F::common_prob(g, Rational01::frac(1, 3), F::prop("psi"))),
            ),
        );
        assert_eq!(p("Es{G,1/2}(K[i] exists x phi(x) & !Cs{G,1/3} psi)"), expected);
    }

    #[test]
    fn printing_examples() {
        let kr = F::know("i", F::prob("i", Rational01::frac(1, 4), F::prop("phi")));
        assert_eq!(print_formula(&kr), "K[i] P[i]>=1/4 phi");
        assert_eq!(print_formula(&F::top()), "!(falsum & !falsum)");
        assert_eq!(p("true"), F::top());
        assert_eq!(p("Kr[i,1/4] phi"), kr);
    }

    #[test]
    fn precedence_and_associativity() {
        let (a, b, c) = (F::prop("a"), F::prop("b"), F::prop("c"));
        assert_eq!(p("a -> b -> c"), F::implies(a.clone(), F::implies(b.clone(), c.clone())));
        assert_eq!(p("a & b | c"), F::or(F::and(a.clone(), b.clone()), c.clone()));
        assert_eq!(p("!a & b"), F::and(F::not(a.clone()), b.clone()));
        assert_eq!(p("K[i] a & b"), F::and(F::know("i", a.clone()), b.clone()));
        assert_eq!(p("forall x R(x) -> b"), F::implies(F::forall("x", F::atom("R", vec![Term::var("x")])), b.clone()));
        assert_eq!(p("a <-> b"), F::iff(a.clone(), b.clone()));
        let right = F::and(a.clone(), F::and(b.clone(), c.clone()));
        assert_eq!(print_formula(&right), "a & (b & c)");
        assert_eq!(p(&print_formula(&right)), right);
    }

    #[test]
    fn terms_follow_the_naming_convention() {
        assert_eq!(parse_term("x").unwrap(), Term::var("x"));
        assert_eq!(parse_term("c").unwrap(), Term::constant("c"));
        assert_eq!(parse_term("?c").unwrap(), Term::var("c"));
        assert_eq!(parse_term("x()").unwrap(), Term::constant("x"));
        assert_eq!(parse_term("f(y, c)").unwrap(), Term::app("f", vec![Term::var("y"), Term::constant("c")]));
        for t in [Term::var("c"), Term::constant("x"), Term::app("g", vec![Term::var("w")])] {
            assert_eq!(parse_term(&print_term(&t)).unwrap(), t);
        }
    }

    #[test]
    fn errors_carry_spans() {
        for bad in ["K[i]", "P[i]>=3/2 phi", "P[i]>=1/0 phi", "R(x) & R(x, y)", "forall c R(c)", "a $ b", "(a", "E{a,a} p", "Es{G} p"] {
            let err = parse_formula(bad).unwrap_err();
            let span = err.span();
            assert!(span.start <= span.end && span.end <= bad.len(), "{bad}: {err:?}");
        }
        assert!(matches!(parse_formula("R(x) & R(x, y)"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse_formula("P[i]>=3/2 phi"), Err(ParseError::Rational { .. })));
    }

    #[test]
    fn depth_guard_rejects_adversarial_nesting() {
        let deep = format!("{}p{}", "(".repeat(5000), ")".repeat(5000));
        assert!(parse_formula(&deep).is_err());
        let negs = format!("{}p", "!".repeat(5000));
        assert!(parse_formula(&negs).is_err());
        let fine = format!("{}p", "!".repeat(100));
        assert!(parse_formula(&fine).is_ok());
    }
}
