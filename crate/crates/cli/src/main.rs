//! `pckfo`: evaluate formulas on models, check proofs, search and fuzz.
//!
//! Exit codes: 0 true or accepted, 1 false or rejected, 2 usage,
//! 3 parse, 4 model invalid, 5 not measurable.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pckfo::oracle::{
    fixed_point_check, find_model, fuzz_class, fuzz_soundness, noncompactness_demo, validity_suite, Family,
    ModelClass, OracleError, SearchBudget, SpaceMode,
};
use pckfo::parser::{parse_model, parse_proof, DocError};
use pckfo::proof::{check, ProofMode};
use pckfo::report::{CheckReport, Verdict};
use pckfo::{parse_formula, print_formula, EvalError, Evaluator, Model, Rational01, Valuation};

#[derive(Debug, Parser)]
#[command(name = "pckfo", version, about = "Model checker and proof checker for first-order probabilistic epistemic logic")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Directory to write witness files into.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a formula at one state or at every state of a model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        state: Option<String>,
        /// Free variable bindings, e.g. `x=d0,y=d1`.
        #[arg(long, value_delimiter = ',')]
        valuation: Vec<String>,
    },
    /// Check a proof document.
    CheckProof {
        proof: PathBuf,
        /// Overrides the mode recorded in the document.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Validate a model document.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Print the class flags of a model.
    Classify {
        #[arg(long)]
        model: PathBuf,
    },
    /// Search the budget for a model and state satisfying a sentence.
    Find {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check random axiom instances on random models.
    Fuzz {
        /// Instances per schema.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        models: usize,
        /// Fuzz one class axiom on models of that class instead.
        #[arg(long, value_enum)]
        class: Option<Class>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Build witnesses for the finite parts of the non-compact sets.
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
    /// Check a family of derived theorems on every budget model.
    Suite {
        #[arg(long)]
        family: Family,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Compare common knowledge operators with their iterates on every budget model.
    Fixpoint {
        /// Probabilistic thresholds, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1/3,1/2,2/3,1")]
        thresholds: Vec<Rational01>,
        /// Also evaluate iterates as formulas on models up to this size.
        #[arg(long, default_value_t = 2)]
        formula_states: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long)]
    budget_states: Option<usize>,
    #[arg(long)]
    budget_domain: Option<usize>,
    #[arg(long)]
    budget_agents: Option<usize>,
    /// Weight grid, comma separated; enables grid probability spaces.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<Rational01>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BudgetArgs {
    fn budget(&self, states: usize, domain: usize) -> SearchBudget {
        let mut b = SearchBudget {
            max_states: self.budget_states.unwrap_or(states),
            max_domain: self.budget_domain.unwrap_or(domain),
            seed: self.seed,
            ..SearchBudget::default()
        };
        if let Some(agents) = self.budget_agents {
            b.max_agents = agents;
        }
        if let Some(grid) = &self.grid {
            b.weight_grid = grid.clone();
            b.spaces = SpaceMode::Grid;
        }
        b
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    Con,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Class {
    Con,
    Obj,
    Sdp,
    Unif,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoKind {
    Noncompactness,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }
    fn parse(message: impl ToString) -> Self {
        Failure { code: 3, message: message.to_string() }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        let code = if matches!(e, DocError::Invalid(_)) { 4 } else { 3 };
        Failure { code, message: e.to_string() }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = if matches!(e, EvalError::NotMeasurable { .. }) { 5 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::usage(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    Ok(parse_model(&read(path)?)?)
}

fn eval(model: &Path, formula: &str, state: Option<&str>, bindings: &[String]) -> Result<CheckReport, Failure> {
    let model = load_model(model)?;
    let f = parse_formula(formula).map_err(Failure::parse)?;
    let mut v = Valuation::new();
    for b in bindings {
        let (x, d) = b.split_once('=').ok_or_else(|| Failure::usage(format!("binding `{b}` is not `var=element`")))?;
        let ix = model.domain_index(d).ok_or_else(|| Failure::usage(format!("unknown domain element `{d}`")))?;
        v.insert(x.to_string(), ix);
    }
    let ext = Evaluator::new(&model).extension(&v, &f)?;
    let text = print_formula(&f);
    if let Some(name) = state {
        let s = model.state_index(name).ok_or_else(|| Failure::usage(format!("unknown state `{name}`")))?;
        let verdict = if ext.contains(s) { Verdict::Sat } else { Verdict::UnsatAtState };
        return Ok(CheckReport::new(verdict).detail("formula", text).detail("state", name).detail("value", ext.contains(s)));
    }
    let rows: Vec<String> = model.states().iter().enumerate().map(|(s, n)| format!("{n}: {}", ext.contains(s))).collect();
    let false_at: Vec<String> = model.states().iter().enumerate().filter(|(s, _)| !ext.contains(*s)).map(|(_, n)| n.clone()).collect();
    let verdict = if false_at.is_empty() { Verdict::Sat } else { Verdict::UnsatAtState };
    Ok(CheckReport::new(verdict)
        .detail("formula", text)
        .detail("all-states", false_at.is_empty())
        .detail("values", rows)
        .detail("false-at", false_at))
}

fn check_proof(path: &Path, mode: Option<Mode>) -> Result<CheckReport, Failure> {
    let mut proof = parse_proof(&read(path)?)?;
    if let Some(mode) = mode {
        proof.mode = match mode {
            Mode::Plain => ProofMode::Plain,
            Mode::Con => ProofMode::Con,
        };
    }
    let verdict = check(&proof);
    let mut report = CheckReport::from_proof_verdict(&verdict, proof.steps.len());
    if let Some(c) = proof.conclusion().filter(|_| verdict.is_accepted()) {
        report.set("conclusion", print_formula(c));
    }
    Ok(report)
}

fn validate(path: &Path) -> Result<CheckReport, Failure> {
    let model = load_model(path)?;
    Ok(CheckReport::new(Verdict::Accepted)
        .detail("states", model.n_states())
        .detail("domain", model.domain().len())
        .detail("agents", model.agents().len()))
}

fn classify(path: &Path) -> Result<CheckReport, Failure> {
    let model = load_model(path)?;
    let flags: Vec<&str> = model.classify().names();
    Ok(CheckReport::new(Verdict::Accepted).detail("classes", flags))
}

fn fuzz(n: usize, models: usize, class: Option<Class>, b: &SearchBudget) -> CheckReport {
    let summary = match class {
        None => fuzz_soundness(b, n, models),
        Some(c) => {
            let class = match c {
                Class::Con => ModelClass::Con,
                Class::Obj => ModelClass::Obj,
                Class::Sdp => ModelClass::Sdp,
                Class::Unif => ModelClass::Unif,
            };
            fuzz_class(class, b, n, models)
        }
    };
    summary.report()
}

fn run(cli: &Cli) -> Result<CheckReport, Failure> {
    match &cli.command {
        Command::Eval { model, formula, state, valuation } => eval(model, formula, state.as_deref(), valuation),
        Command::CheckProof { proof, mode } => check_proof(proof, *mode),
        Command::Validate { model } => validate(model),
        Command::Classify { model } => classify(model),
        Command::Find { formula, budget } => {
            let f = parse_formula(formula).map_err(Failure::parse)?;
            Ok(find_model(&f, &budget.budget(2, 1))?.report(&f))
        }
        Command::Fuzz { n, models, class, budget } => Ok(fuzz(*n, *models, *class, &budget.budget(3, 2))),
        Command::Demo { which: DemoKind::Noncompactness, m } => Ok(noncompactness_demo(*m)?),
        Command::Suite { family, budget } => Ok(validity_suite(*family, &budget.budget(2, 1))?),
        Command::Fixpoint { thresholds, formula_states, budget } => {
            Ok(fixed_point_check(&budget.budget(3, 1), thresholds, *formula_states)?.0)
        }
    }
}

fn exit_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Sat | Verdict::ValidInSuite | Verdict::Accepted | Verdict::AcceptedWithBoundedCertificates => 0,
        Verdict::UnsatAtState | Verdict::Rejected | Verdict::NotFoundWithinBudget => 1,
    }
}

fn write_artifacts(dir: &Path, report: &CheckReport) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    for a in &report.artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.content).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|report| {
        if let Some(dir) = &cli.out {
            write_artifacts(dir, &report)?;
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            if cli.json {
                print!("{}", report.to_json());
            } else {
                print!("{report}");
            }
            ExitCode::from(exit_code(report.verdict))
        }
        Err(f) => {
            if cli.json {
                let doc = serde_json::json!({ "error": f.message, "exit-code": f.code });
                println!("{}", serde_json::to_string_pretty(&doc).expect("plain json"));
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
