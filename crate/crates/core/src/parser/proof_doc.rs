//! The `proof.json` document.
//!
//! ```json
//! {
//!   "mode": "plain",
//!   "hypotheses": [],
//!   "steps": [
//!     {"formula": "phi -> phi", "just": {"kind": "axiom", "name": "Prop"}},
//!     {"formula": "K[i] (phi -> phi)", "just": {"kind": "RK", "premise": 0, "agent": "i"}}
//!   ]
//! }
//! ```
//!
//! Justification kinds and their fields:
//!
//! | kind | fields |
//! |------|--------|
//! | `axiom` | `name` (`Prop`, `FO1`, ..., `P5`, `APE`, `APC`, `CON`, `OBJ`, `SDP-A`, `UNIF-A`) |
//! | `CON-axiom` | none; same as `axiom` with name `CON` |
//! | `hyp` | `index` into `hypotheses` |
//! | `MP` | `minor` (step proving `A`), `major` (step proving `A -> B`) |
//! | `FOR` | `premise`, `var` |
//! | `RK`, `RP` | `premise`, `agent` |
//! | `RE`, `RPE` | `k` (default 0), `premises`: agent -> step |
//! | `RC`, `RPC`, `RA` | `k` (default 0), `bound`, `premises`: index `m` -> step |
//!
//! `mode` is `plain` (default) or `con`. Steps may only cite earlier steps.
//! [`proof_to_json`] writes the canonical form.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::axioms::AxiomName;
use crate::proof::{Certificate, Justification, Proof, ProofMode, Step};
use crate::syntax::AgentId;

use super::formula::{parse_formula, print_formula};
use super::DocError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofDoc {
    #[serde(default)]
    pub mode: ProofMode,
    #[serde(default)]
    pub hypotheses: Vec<String>,
    pub steps: Vec<StepDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub formula: String,
    pub just: JustDoc,
}

const KINDS: [&str; 12] = ["axiom", "CON-axiom", "hyp", "MP", "FOR", "RK", "RP", "RE", "RPE", "RC", "RPC", "RA"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum JustDoc {
    #[serde(rename = "axiom")]
    Axiom { name: String },
    #[serde(rename = "CON-axiom")]
    ConAxiom {},
    #[serde(rename = "hyp")]
    Hyp { index: usize },
    MP { minor: usize, major: usize },
    FOR { premise: usize, var: String },
    RK { premise: usize, agent: String },
    RP { premise: usize, agent: String },
    RE {
        #[serde(default)]
        k: usize,
        premises: BTreeMap<String, usize>,
    },
    RPE {
        #[serde(default)]
        k: usize,
        premises: BTreeMap<String, usize>,
    },
    RC {
        #[serde(default)]
        k: usize,
        bound: u32,
        #[serde(deserialize_with = "index_map")]
        premises: BTreeMap<u32, usize>,
    },
    RPC {
        #[serde(default)]
        k: usize,
        bound: u32,
        #[serde(deserialize_with = "index_map")]
        premises: BTreeMap<u32, usize>,
    },
    RA {
        #[serde(default)]
        k: usize,
        bound: u32,
        #[serde(deserialize_with = "index_map")]
        premises: BTreeMap<u32, usize>,
    },
}

// JSON object keys arrive as strings inside a tagged enum
fn index_map<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, usize>, D::Error> {
    BTreeMap::<String, usize>::deserialize(d)?
        .into_iter()
        .map(|(k, v)| {
            k.parse::<u32>().map(|m| (m, v)).map_err(|_| D::Error::custom(format!("certificate index `{k}` is not a natural number")))
        })
        .collect()
}

#[derive(Deserialize)]
struct RawProof {
    #[serde(default)]
    steps: Vec<RawStep>,
}

#[derive(Deserialize)]
struct RawStep {
    just: serde_json::Value,
}

pub fn parse_proof(text: &str) -> Result<Proof, DocError> {
    // rule names are checked before the schema so the error names them
    let raw: RawProof = serde_json::from_str(text)?;
    for (ix, step) in raw.steps.iter().enumerate() {
        if let Some(kind) = step.just.get("kind").and_then(|k| k.as_str()) {
            if !KINDS.contains(&kind) {
                return Err(DocError::Proof {
                    location: format!("steps[{ix}].just"),
                    message: format!("unknown rule name `{kind}`"),
                });
            }
        }
    }
    let doc: ProofDoc = serde_json::from_str(text)?;
    proof_from_doc(&doc)
}

pub fn proof_from_doc(doc: &ProofDoc) -> Result<Proof, DocError> {
    let formula = |location: String, text: &str| {
        parse_formula(text).map_err(|source| DocError::Formula { location, source })
    };
    let hypotheses = doc
        .hypotheses
        .iter()
        .enumerate()
        .map(|(ix, h)| formula(format!("hypotheses[{ix}]"), h))
        .collect::<Result<Vec<_>, _>>()?;
    let n = doc.steps.len();
    let mut steps = Vec::with_capacity(n);
    for (ix, step) in doc.steps.iter().enumerate() {
        let location = format!("steps[{ix}]");
        let f = formula(format!("{location}.formula"), &step.formula)?;
        let just = justification(&step.just).map_err(|message| DocError::Proof { location: location.clone(), message })?;
        for cited in just.premises() {
            let message = if cited >= n {
                format!("dangling step reference {cited}")
            } else if cited >= ix {
                format!("cites step {cited}, which does not precede it")
            } else {
                continue;
            };
            return Err(DocError::Proof { location, message });
        }
        if let Justification::Hyp(h) = just {
            if h >= hypotheses.len() {
                return Err(DocError::Proof { location, message: format!("dangling hypothesis reference {h}") });
            }
        }
        steps.push(Step { formula: f, just });
    }
    Ok(Proof { mode: doc.mode, hypotheses, steps })
}

fn justification(doc: &JustDoc) -> Result<Justification, String> {
    let agents = |ps: &BTreeMap<String, usize>| ps.iter().map(|(a, p)| (AgentId::new(a.clone()), *p)).collect();
    let cert = |bound: &u32, ps: &BTreeMap<u32, usize>| Certificate { bound: *bound, premises: ps.clone() };
    Ok(match doc {
        JustDoc::Axiom { name } => {
            Justification::Axiom(name.parse::<AxiomName>().map_err(|_| format!("unknown axiom name `{name}`"))?)
        }
        JustDoc::ConAxiom {} => Justification::Axiom(AxiomName::CON),
        JustDoc::Hyp { index } => Justification::Hyp(*index),
        JustDoc::MP { minor, major } => Justification::Mp { minor: *minor, major: *major },
        JustDoc::FOR { premise, var } => Justification::For { premise: *premise, var: var.clone() },
        JustDoc::RK { premise, agent } => Justification::Rk { premise: *premise, agent: AgentId::new(agent.clone()) },
        JustDoc::RP { premise, agent } => Justification::Rp { premise: *premise, agent: AgentId::new(agent.clone()) },
        JustDoc::RE { k, premises } => Justification::Re { k: *k, premises: agents(premises) },
        JustDoc::RPE { k, premises } => Justification::Rpe { k: *k, premises: agents(premises) },
        JustDoc::RC { k, bound, premises } => Justification::Rc { k: *k, cert: cert(bound, premises) },
        JustDoc::RPC { k, bound, premises } => Justification::Rpc { k: *k, cert: cert(bound, premises) },
        JustDoc::RA { k, bound, premises } => Justification::Ra { k: *k, cert: cert(bound, premises) },
    })
}

pub fn proof_to_doc(proof: &Proof) -> ProofDoc {
    let agents = |ps: &BTreeMap<AgentId, usize>| ps.iter().map(|(a, p)| (a.to_string(), *p)).collect();
    let steps = proof
        .steps
        .iter()
        .map(|s| {
            let just = match &s.just {
                Justification::Axiom(name) => JustDoc::Axiom { name: name.to_string() },
                Justification::Hyp(index) => JustDoc::Hyp { index: *index },
                Justification::Mp { minor, major } => JustDoc::MP { minor: *minor, major: *major },
                Justification::For { premise, var } => JustDoc::FOR { premise: *premise, var: var.clone() },
                Justification::Rk { premise, agent } => JustDoc::RK { premise: *premise, agent: agent.to_string() },
                Justification::Rp { premise, agent } => JustDoc::RP { premise: *premise, agent: agent.to_string() },
                Justification::Re { k, premises } => JustDoc::RE { k: *k, premises: agents(premises) },
                Justification::Rpe { k, premises } => JustDoc::RPE { k: *k, premises: agents(premises) },
                Justification::Rc { k, cert } => {
                    JustDoc::RC { k: *k, bound: cert.bound, premises: cert.premises.clone() }
                }
                Justification::Rpc { k, cert } => {
                    JustDoc::RPC { k: *k, bound: cert.bound, premises: cert.premises.clone() }
                }
                Justification::Ra { k, cert } => {
                    JustDoc::RA { k: *k, bound: cert.bound, premises: cert.premises.clone() }
                }
            };
            StepDoc { formula: print_formula(&s.formula), just }
        })
        .collect();
    ProofDoc { mode: proof.mode, hypotheses: proof.hypotheses.iter().map(print_formula).collect(), steps }
}

pub fn proof_to_json(proof: &Proof) -> String {
    let mut out = serde_json::to_string_pretty(&proof_to_doc(proof)).expect("proof documents always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{check, ProofVerdict};

    const NECESSITATION: &str = r#"{
        "hypotheses": [],
        "steps": [
            {"formula": "phi -> phi", "just": {"kind": "axiom", "name": "Prop"}},
            {"formula": "K[i] (phi -> phi)", "just": {"kind": "RK", "premise": 0, "agent": "i"}}
        ]
    }"#;

    #[test]
    fn two_step_necessitation() {
        let proof = parse_proof(NECESSITATION).unwrap();
        assert_eq!(proof.steps.len(), 2);
        assert_eq!(check(&proof), ProofVerdict::Accepted);
        assert_eq!(parse_proof(&proof_to_json(&proof)).unwrap(), proof);
    }

    #[test]
    fn later_index_is_an_error() {
        let text = NECESSITATION.replace("\"premise\": 0", "\"premise\": 1");
        let err = parse_proof(&text).unwrap_err();
        assert!(err.to_string().contains("does not precede"), "{err}");
        let text = NECESSITATION.replace("\"premise\": 0", "\"premise\": 7");
        assert!(parse_proof(&text).unwrap_err().to_string().contains("dangling"));
    }

    #[test]
    fn unknown_rule_name() {
        let text = NECESSITATION.replace("\"RK\"", "\"RX\"");
        assert!(parse_proof(&text).unwrap_err().to_string().contains("unknown rule name `RX`"));
        let text = NECESSITATION.replace("\"Prop\"", "\"Tauto\"");
        assert!(parse_proof(&text).unwrap_err().to_string().contains("unknown axiom name"));
    }

    #[test]
    fn everyone_rule_per_member() {
        let text = r#"{
            "hypotheses": ["true -> K[a] phi", "true -> K[b] phi"],
            "steps": [
                {"formula": "true -> K[a] phi", "just": {"kind": "hyp", "index": 0}},
                {"formula": "true -> K[b] phi", "just": {"kind": "hyp", "index": 1}},
                {"formula": "true -> E{a,b} phi", "just": {"kind": "RE", "premises": {"a": 0, "b": 1}}}
            ]
        }"#;
        let proof = parse_proof(text).unwrap();
        assert_eq!(check(&proof), ProofVerdict::Accepted);
    }

    #[test]
    fn con_axiom_kind() {
        let text = r#"{"mode": "con", "steps": [
            {"formula": "K[i] p -> P[i]>=1 p", "just": {"kind": "CON-axiom"}}
        ]}"#;
        let proof = parse_proof(text).unwrap();
        assert_eq!(proof.mode, ProofMode::Con);
        assert_eq!(check(&proof), ProofVerdict::Accepted);
    }
}
