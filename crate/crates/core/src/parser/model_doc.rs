//! The `model.json` document.
//!
//! ```json
//! {
//!   "states": ["s0", "s1"],
//!   "domain": ["d0"],
//!   "agents": ["a", "b"],
//!   "groups": {"G": ["a", "b"]},
//!   "functions": {"c": {"arity": 0, "table": [["d0"]]}},
//!   "relations": {"p": {"arity": 0, "states": {"s0": [[]]}}},
//!   "access": {"a": [["s0", "s0"], ["s0", "s1"]], "b": []},
//!   "prob": {"a": {"s0": {"sample": ["s0", "s1"], "atoms": [["s0"], ["s1"]], "weights": {"0": "1/2", "1": "1/2"}}}}
//! }
//! ```
//!
//! A function row lists the arguments followed by the value. A function may
//! instead give per-state tables under `"states"`; they must all agree since
//! functions are rigid. `atoms` defaults to singletons over the sample and
//! `weights` to the uniform distribution over atoms. Every agent needs a
//! space at every state. States, domain elements and agents are sorted in
//! natural order, so permuting declarations gives the same model.
//! [`model_to_json`] writes the canonical form, with every field present.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::model::{state_set, Model, ModelBuilder, ProbSpace, Violation};
use crate::rational::Rational01;
use crate::syntax::AgentId;

use super::DocError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub states: Vec<String>,
    pub domain: Vec<String>,
    pub agents: Vec<String>,
    #[serde(default)]
    pub groups: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionDoc>,
    #[serde(default)]
    pub relations: BTreeMap<String, RelationDoc>,
    #[serde(default)]
    pub access: BTreeMap<String, Vec<[String; 2]>>,
    #[serde(default)]
    pub prob: BTreeMap<String, BTreeMap<String, SpaceDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<BTreeMap<String, Vec<Vec<String>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub arity: usize,
    #[serde(default)]
    pub states: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub sample: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<usize, Rational01>>,
}

/// Orders names so that embedded numbers compare numerically (`s2 < s10`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, xa), (db, xb)) in ca.iter().zip(&cb) {
        let ord = if *da && *db {
            let (ta, tb) = (xa.trim_start_matches('0'), xb.trim_start_matches('0'));
            ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb)).then_with(|| xa.len().cmp(&xb.len()))
        } else {
            xa.cmp(xb)
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

fn sorted(names: &[String]) -> Vec<String> {
    let mut out = names.to_vec();
    out.sort_by(|a, b| natural_cmp(a, b));
    out
}

struct Reader<'d> {
    states: HashMap<&'d str, usize>,
    domain: HashMap<&'d str, usize>,
    agents: HashMap<&'d str, usize>,
    violations: Vec<Violation>,
}

impl<'d> Reader<'d> {
    fn complain(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { location: location.into(), message: message.into() });
    }

    fn state(&mut self, loc: &str, name: &str) -> Option<usize> {
        let found = self.states.get(name).copied();
        if found.is_none() {
            self.complain(loc, format!("unknown state `{name}`"));
        }
        found
    }

    fn element(&mut self, loc: &str, name: &str) -> Option<usize> {
        let found = self.domain.get(name).copied();
        if found.is_none() {
            self.complain(loc, format!("element `{name}` outside the domain"));
        }
        found
    }

    fn agent(&mut self, loc: &str, name: &str) -> Option<usize> {
        let found = self.agents.get(name).copied();
        if found.is_none() {
            self.complain(loc, format!("unknown agent `{name}`"));
        }
        found
    }

    fn tuple(&mut self, loc: &str, names: &[String]) -> Option<Vec<usize>> {
        let out: Vec<_> = names.iter().map(|d| self.element(loc, d)).collect();
        out.into_iter().collect()
    }

    fn function_rows(&mut self, loc: &str, arity: usize, rows: &[Vec<String>]) -> BTreeMap<Vec<usize>, usize> {
        let mut table = BTreeMap::new();
        for row in rows {
            if row.len() != arity + 1 {
                self.complain(loc, format!("row {row:?} should list {arity} arguments and a value"));
                continue;
            }
            let Some(mut t) = self.tuple(loc, row) else { continue };
            let value = t.pop().expect("nonempty row");
            if let Some(prev) = table.insert(t, value) {
                if prev != value {
                    self.complain(loc, format!("row {row:?} gives a second value for the same arguments"));
                }
            }
        }
        table
    }
}

/// Reads and validates a model document.
pub fn parse_model(text: &str) -> Result<Model, DocError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    model_from_doc(&doc)
}

pub fn model_from_doc(doc: &ModelDoc) -> Result<Model, DocError> {
    let states = sorted(&doc.states);
    let domain = sorted(&doc.domain);
    let agents = sorted(&doc.agents);
    let n = states.len();
    let index = |names: &'_ [String]| -> HashMap<String, usize> {
        names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()
    };
    let (si, di, ai) = (index(&states), index(&domain), index(&agents));
    let mut r = Reader {
        states: si.iter().map(|(k, v)| (k.as_str(), *v)).collect(),
        domain: di.iter().map(|(k, v)| (k.as_str(), *v)).collect(),
        agents: ai.iter().map(|(k, v)| (k.as_str(), *v)).collect(),
        violations: Vec::new(),
    };
    let mut b = ModelBuilder::new(states.clone(), domain, agents.iter().map(|a| AgentId::new(a.as_str())).collect());

    for (name, members) in &doc.groups {
        let members: Vec<&str> = members.iter().map(String::as_str).collect();
        b.group(name, &members);
    }
    for (name, f) in &doc.functions {
        let loc = format!("functions.{name}");
        let table = match (&f.table, &f.states) {
            (Some(rows), None) => r.function_rows(&loc, f.arity, rows),
            (None, Some(per_state)) => {
                let mut tables: Vec<(String, BTreeMap<Vec<usize>, usize>)> = Vec::new();
                for (s, rows) in per_state {
                    r.state(&loc, s);
                    tables.push((s.clone(), r.function_rows(&loc, f.arity, rows)));
                }
                if let Some(((s0, t0), rest)) = tables.split_first() {
                    if let Some((s1, _)) = rest.iter().find(|(_, t)| t != t0) {
                        r.complain(&loc, format!("function is not rigid: interpretation differs between states `{s0}` and `{s1}`"));
                    }
                }
                if per_state.len() != n {
                    r.complain(&loc, "per-state tables must cover every state");
                }
                tables.into_iter().next().map(|(_, t)| t).unwrap_or_default()
            }
            _ => {
                r.complain(&loc, "give exactly one of `table` or `states`");
                continue;
            }
        };
        b.function(name, f.arity, table);
    }
    for (name, rel) in &doc.relations {
        let loc = format!("relations.{name}");
        b.relation(name, rel.arity);
        for (s, tuples) in &rel.states {
            let Some(s) = r.state(&loc, s) else { continue };
            for t in tuples {
                if t.len() != rel.arity {
                    r.complain(&loc, format!("tuple {t:?} has length {}, arity is {}", t.len(), rel.arity));
                    continue;
                }
                if let Some(t) = r.tuple(&loc, t) {
                    b.fact(name, s, t);
                }
            }
        }
    }
    for (agent, edges) in &doc.access {
        let loc = format!("access.{agent}");
        let Some(i) = r.agent(&loc, agent) else { continue };
        for [from, to] in edges {
            if let (Some(from), Some(to)) = (r.state(&loc, from), r.state(&loc, to)) {
                b.edge(i, from, to);
            }
        }
    }
    for (agent, per_state) in &doc.prob {
        let Some(i) = r.agent(&format!("prob.{agent}"), agent) else { continue };
        for (s, space) in per_state {
            let loc = format!("prob.{agent}.{s}");
            let Some(s) = r.state(&loc, s) else { continue };
            let sample: Vec<usize> = space.sample.iter().filter_map(|t| r.state(&loc, t)).collect();
            let atoms: Vec<Vec<usize>> = match &space.atoms {
                Some(atoms) => atoms.iter().map(|a| a.iter().filter_map(|t| r.state(&loc, t)).collect()).collect(),
                None => sample.iter().map(|t| vec![*t]).collect(),
            };
            let weights: Vec<Rational01> = match &space.weights {
                Some(w) => {
                    if let Some(bad) = w.keys().find(|k| **k >= atoms.len()) {
                        r.complain(&loc, format!("weight for atom #{bad}, but there are {} atoms", atoms.len()));
                    }
                    (0..atoms.len()).map(|k| w.get(&k).cloned().unwrap_or_else(Rational01::zero)).collect()
                }
                None => {
                    let w = Rational01::frac(1, atoms.len().max(1) as i64);
                    vec![w; atoms.len()]
                }
            };
            let sample_set = state_set(n, sample.iter().copied());
            if sample_set.count_ones(..) != sample.len() {
                r.complain(&loc, "sample lists a state twice");
            }
            let atom_sets = atoms.into_iter().map(|a| state_set(n, a)).collect();
            b.space(i, s, ProbSpace::new(sample_set, atom_sets, weights));
        }
    }

    let mut violations = r.violations;
    violations.extend(b.violations());
    if !violations.is_empty() {
        return Err(DocError::Invalid(violations));
    }
    Ok(b.build().expect("violations checked"))
}

pub fn model_to_doc(m: &Model) -> ModelDoc {
    let states = m.states();
    let domain = m.domain();
    let names = |set: &crate::model::StateSet| -> Vec<String> { set.ones().map(|s| states[s].clone()).collect() };
    let functions = m
        .functions()
        .iter()
        .map(|(name, f)| {
            let rows = f
                .table
                .iter()
                .map(|(args, v)| args.iter().chain([v]).map(|d| domain[*d].clone()).collect())
                .collect();
            (name.clone(), FunctionDoc { arity: f.arity, table: Some(rows), states: None })
        })
        .collect();
    let relations = m
        .relations()
        .iter()
        .map(|(name, rel)| {
            let per_state = rel
                .per_state
                .iter()
                .enumerate()
                .filter(|(_, tuples)| !tuples.is_empty())
                .map(|(s, tuples)| {
                    let rows = tuples.iter().map(|t| t.iter().map(|d| domain[*d].clone()).collect()).collect();
                    (states[s].clone(), rows)
                })
                .collect();
            (name.clone(), RelationDoc { arity: rel.arity, states: per_state })
        })
        .collect();
    let mut access = BTreeMap::new();
    let mut prob = BTreeMap::new();
    for (i, agent) in m.agents().iter().enumerate() {
        let mut edges = Vec::new();
        let mut spaces = BTreeMap::new();
        for s in 0..m.n_states() {
            edges.extend(m.access(i, s).ones().map(|t| [states[s].clone(), states[t].clone()]));
            let sp = m.space(i, s);
            spaces.insert(
                states[s].clone(),
                SpaceDoc {
                    sample: names(sp.sample()),
                    atoms: Some(sp.atoms().iter().map(names).collect()),
                    weights: Some(sp.weights().iter().cloned().enumerate().collect()),
                },
            );
        }
        access.insert(agent.to_string(), edges);
        prob.insert(agent.to_string(), spaces);
    }
    ModelDoc {
        states: states.to_vec(),
        domain: domain.to_vec(),
        agents: m.agents().iter().map(ToString::to_string).collect(),
        groups: m
            .groups()
            .iter()
            .map(|(g, members)| (g.clone(), members.iter().map(ToString::to_string).collect()))
            .collect(),
        functions,
        relations,
        access,
        prob,
    }
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn model_to_json(m: &Model) -> String {
    let mut out = serde_json::to_string_pretty(&model_to_doc(m)).expect("model documents always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "states": ["s0"], "domain": ["d0"], "agents": ["a"],
        "prob": {"a": {"s0": {"sample": ["s0"]}}}
    }"#;

    #[test]
    fn minimal_document() {
        let m = parse_model(MINIMAL).unwrap();
        assert_eq!(m.n_states(), 1);
        assert_eq!(m.domain(), ["d0"]);
        assert!(m.space(0, 0).is_powerset());
        let again = parse_model(&model_to_json(&m)).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn sample_outside_states_is_rejected() {
        let doc = MINIMAL.replace(r#""sample": ["s0"]"#, r#""sample": ["s0", "s9"]"#);
        let err = parse_model(&doc).unwrap_err();
        assert!(err.to_string().contains("unknown state `s9`"), "{err}");
    }

    #[test]
    fn non_rigid_function_is_rejected() {
        let doc = r#"{
            "states": ["s0", "s1"], "domain": ["d0", "d1"], "agents": ["a"],
            "functions": {"f": {"arity": 1, "states": {
                "s0": [["d0", "d1"], ["d1", "d0"]],
                "s1": [["d0", "d0"], ["d1", "d0"]]}}},
            "prob": {"a": {"s0": {"sample": ["s0"]}, "s1": {"sample": ["s1"]}}}
        }"#;
        let err = parse_model(doc).unwrap_err();
        assert!(err.to_string().contains("not rigid"), "{err}");
    }

    #[test]
    fn declaration_order_is_irrelevant() {
        let a = r#"{"states": ["s1", "s0"], "domain": ["d0"], "agents": ["b", "a"],
            "access": {"a": [["s0", "s1"]]},
            "prob": {"a": {"s0": {"sample": ["s0"]}, "s1": {"sample": ["s0", "s1"]}},
                     "b": {"s0": {"sample": ["s1"]}, "s1": {"sample": ["s1"]}}}}"#;
        let b = r#"{"states": ["s0", "s1"], "domain": ["d0"], "agents": ["a", "b"],
            "access": {"a": [["s0", "s1"]]},
            "prob": {"b": {"s1": {"sample": ["s1"]}, "s0": {"sample": ["s1"]}},
                     "a": {"s1": {"sample": ["s1", "s0"]}, "s0": {"sample": ["s0"]}}}}"#;
        assert_eq!(parse_model(a).unwrap(), parse_model(b).unwrap());
    }

    #[test]
    fn natural_order() {
        let mut v = vec!["s10", "s2", "s1", "a"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, ["a", "s1", "s2", "s10"]);
    }
}
