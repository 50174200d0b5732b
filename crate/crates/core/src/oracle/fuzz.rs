use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::axioms::{instantiate, AxiomName};
use crate::eval::{EvalError, Evaluator, Valuation};
use crate::model::Model;
use crate::parser::{model_to_json, print_formula};
use crate::report::{CheckReport, Verdict};
use crate::syntax::{free_vars, Formula};

use super::random::{class_model, random_instance, random_model, FuzzSignature, ModelClass};
use super::SearchBudget;

/// The schemas sound on every model.
pub const FUZZ_SCHEMAS: [AxiomName; 14] = [
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

const MAX_REPORTED: usize = 10;

/// A false axiom instance, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzFailure {
    pub schema: AxiomName,
    pub formula: String,
    pub state: String,
    pub valuation: BTreeMap<String, String>,
    pub model_json: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaStats {
    pub instances: usize,
    /// (instance, model) pairs evaluated at every state and valuation.
    pub checks: usize,
    /// Pairs skipped because some probability operand was not measurable.
    pub not_measurable: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FuzzSummary {
    pub seed: u64,
    pub models: usize,
    pub per_schema: BTreeMap<AxiomName, SchemaStats>,
    /// The first few failures, in a deterministic order.
    pub failures: Vec<FuzzFailure>,
}

impl FuzzSummary {
    pub fn total_failures(&self) -> usize {
        self.per_schema.values().map(|s| s.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }

    pub fn report(&self) -> CheckReport {
        let verdict = if self.passed() { Verdict::ValidInSuite } else { Verdict::UnsatAtState };
        let mut r = CheckReport::new(verdict).detail("seed", self.seed).detail("models", self.models);
        let rows: Vec<String> = self
            .per_schema
            .iter()
            .map(|(name, s)| {
                format!(
                    "{name}: {} instances, {} checks, {} skipped (not measurable), {} failures",
                    s.instances, s.checks, s.not_measurable, s.failures
                )
            })
            .collect();
        r.set("schemas", rows);
        r.set("failures", self.total_failures());
        for (ix, f) in self.failures.iter().enumerate() {
            r.set(&format!("counterexample-{ix}"), format!("{} at {} {:?}: {}", f.schema, f.state, f.valuation, f.formula));
            r.artifact(format!("counterexample-{ix}.json"), f.model_json.clone());
        }
        r
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Every assignment of the given variables to domain elements.
fn valuations(vars: &[String], domain: usize) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for x in vars {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..domain).map(move |d| {
                    let mut w = v.clone();
                    w.insert(x.clone(), d);
                    w
                })
            })
            .collect();
    }
    out
}

enum Outcome {
    Holds,
    NotMeasurable,
    Fails { state: usize, valuation: Valuation },
}

fn check_everywhere(model: &Model, f: &Formula, vars: &[String]) -> Result<Outcome, EvalError> {
    let mut ev = Evaluator::new(model);
    for v in valuations(vars, model.domain().len()) {
        match ev.extension(&v, f) {
            Ok(ext) => {
                if let Some(state) = (0..model.n_states()).find(|s| !ext.contains(*s)) {
                    return Ok(Outcome::Fails { state, valuation: v });
                }
            }
            Err(EvalError::NotMeasurable { .. }) => return Ok(Outcome::NotMeasurable),
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome::Holds)
}

fn signature(b: &SearchBudget) -> FuzzSignature {
    FuzzSignature {
        max_states: b.max_states.max(1),
        max_domain: b.max_domain.max(1),
        grid: b.weight_grid.clone(),
        ..FuzzSignature::default()
    }
}

fn run(
    seed: u64,
    models: &[Model],
    schemas: &[AxiomName],
    instances: usize,
    sig: &FuzzSignature,
    summary: &mut FuzzSummary,
) {
    for (k, &schema) in schemas.iter().enumerate() {
        let stats = summary.per_schema.entry(schema).or_default();
        for j in 0..instances {
            let mut rng = rng_for(seed, ((k as u64 + 1) << 32) | j as u64);
            let params = random_instance(&mut rng, sig, schema);
            let f = instantiate(&params).expect("generated instances meet their side conditions");
            let vars: Vec<String> = free_vars(&f).into_iter().collect();
            stats.instances += 1;
            for model in models {
                match check_everywhere(model, &f, &vars) {
                    Ok(Outcome::Holds) => stats.checks += 1,
                    Ok(Outcome::NotMeasurable) => stats.not_measurable += 1,
                    Ok(Outcome::Fails { state, valuation }) => {
                        stats.checks += 1;
                        stats.failures += 1;
                        if summary.failures.len() < MAX_REPORTED {
                            summary.failures.push(FuzzFailure {
                                schema,
                                formula: print_formula(&f),
                                state: model.states()[state].clone(),
                                valuation: valuation.iter().map(|(x, d)| (x.clone(), model.domain()[*d].clone())).collect(),
                                model_json: model_to_json(model),
                            });
                        }
                    }
                    Err(e) => panic!("fuzz vocabulary is interpreted by every fuzz model: {e}"),
                }
            }
        }
    }
}

/// Checks `instances` random instances of every schema in
/// [`FUZZ_SCHEMAS`] at every state of `n_models` random models.
///
/// Models and instances come from independent streams derived from the
/// budget's seed, so results do not depend on evaluation order.
pub fn fuzz_soundness(b: &SearchBudget, instances: usize, n_models: usize) -> FuzzSummary {
    let sig = signature(b);
    let models: Vec<Model> = (0..n_models).map(|j| random_model(&mut rng_for(b.seed, j as u64), &sig)).collect();
    let mut summary = FuzzSummary { seed: b.seed, models: n_models, ..FuzzSummary::default() };
    run(b.seed, &models, &FUZZ_SCHEMAS, instances, &sig, &mut summary);
    summary
}

/// The class axiom of `class` on `n_models` models of that class.
pub fn fuzz_class(class: ModelClass, b: &SearchBudget, instances: usize, n_models: usize) -> FuzzSummary {
    let sig = signature(b);
    let base = 1u64 << 48 | (class as u64) << 40;
    let models: Vec<Model> = (0..n_models).map(|j| class_model(&mut rng_for(b.seed, base | j as u64), &sig, class)).collect();
    let mut summary = FuzzSummary { seed: b.seed, models: n_models, ..FuzzSummary::default() };
    run(b.seed ^ base, &models, &[class.axiom()], instances, &sig, &mut summary);
    summary
}

/// Looks for a model outside `class` falsifying an instance of its axiom,
/// which shows the class restriction matters.
pub fn class_sanity(class: ModelClass, b: &SearchBudget, tries: usize) -> Option<FuzzFailure> {
    let sig = signature(b);
    let base = 2u64 << 48 | (class as u64) << 40;
    for j in 0..tries {
        let mut rng = rng_for(b.seed, base | j as u64);
        let model = random_model(&mut rng, &sig);
        if class.holds(&model) {
            continue;
        }
        let f = instantiate(&random_instance(&mut rng, &sig, class.axiom())).expect("valid instance");
        let vars: Vec<String> = free_vars(&f).into_iter().collect();
        if let Ok(Outcome::Fails { state, valuation }) = check_everywhere(&model, &f, &vars) {
            return Some(FuzzFailure {
                schema: class.axiom(),
                formula: print_formula(&f),
                state: model.states()[state].clone(),
                valuation: valuation.iter().map(|(x, d)| (x.clone(), model.domain()[*d].clone())).collect(),
                model_json: model_to_json(&model),
            });
        }
    }
    None
}
