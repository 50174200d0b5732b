//! Structured results shared by the oracle and the command line.

use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::proof::ProofVerdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Sat,
    UnsatAtState,
    ValidInSuite,
    Accepted,
    AcceptedWithBoundedCertificates,
    Rejected,
    NotFoundWithinBudget,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Sat => "sat",
            Verdict::UnsatAtState => "unsat-at-state",
            Verdict::ValidInSuite => "valid-in-suite",
            Verdict::Accepted => "accepted",
            Verdict::AcceptedWithBoundedCertificates => "accepted-with-bounded-certificates",
            Verdict::Rejected => "rejected",
            Verdict::NotFoundWithinBudget => "not-found-within-budget",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A serialized witness, e.g. a counterexample model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    /// Suggested file name.
    pub name: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub details: Map<String, Value>,
    pub artifacts: Vec<Artifact>,
}

impl CheckReport {
    pub fn new(verdict: Verdict) -> Self {
        CheckReport { verdict, details: Map::new(), artifacts: Vec::new() }
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    pub fn artifact(&mut self, name: impl Into<String>, content: impl Into<String>) {
        self.artifacts.push(Artifact { name: name.into(), content: content.into() });
    }

    pub fn from_proof_verdict(verdict: &ProofVerdict, steps: usize) -> Self {
        let report = match verdict {
            ProofVerdict::Accepted => CheckReport::new(Verdict::Accepted),
            ProofVerdict::AcceptedWithBoundedCertificates { bound } => {
                CheckReport::new(Verdict::AcceptedWithBoundedCertificates).detail("bound", *bound)
            }
            ProofVerdict::Rejected { step, reason } => CheckReport::new(Verdict::Rejected)
                .detail("step", *step)
                .detail("reason", reason.to_string()),
        };
        report.detail("steps", steps).detail("summary", verdict.to_string()).detail("proof-length", "finite")
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports always serialize");
        out.push('\n');
        out
    }
}

fn render(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        for (key, value) in &self.details {
            match value {
                Value::Array(items) if items.iter().all(|v| !v.is_array() && !v.is_object()) => {
                    writeln!(f, "{key}:")?;
                    for item in items {
                        writeln!(f, "  {}", render(item))?;
                    }
                }
                _ => writeln!(f, "{key}: {}", render(value))?,
            }
        }
        for a in &self.artifacts {
            writeln!(f, "artifact: {}", a.name)?;
        }
        Ok(())
    }
}
