mod commands;
mod sample;

use clap::{Args, Parser, Subcommand};
use sodneg::error::EngineError;
use sodneg::planner::{SearchBudget, BUDGET_ENV};
use sodneg::scenario::ScenarioDocument;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sodneg", version, about = "Negotiation over state oriented domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario JSON file.
    scenario: PathBuf,
    /// Label budget per search; overrides the environment.
    #[arg(long)]
    budget: Option<usize>,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Stand-alone costs, joint frontier and witness plans; replays written plans.
    Plan(Common),
    /// Interaction type under the scenario worths.
    Classify(Common),
    /// Runs one mechanism and reports the selected deal.
    Negotiate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["mixed", "semi-coop", "multi-plan"])]
        deal_type: Option<String>,
        #[arg(long, value_parser = ["nash-product", "equal-split"])]
        rule: Option<String>,
        /// Append the deal-type hierarchy table.
        #[arg(long)]
        hierarchy: bool,
        /// Realize one concrete branch of the lottery with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Declaration game over private worths.
    WorthGame {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["strict", "tolerant"])]
        mechanism: Option<String>,
        #[arg(long, value_parser = ["min-sufficient", "min-concession", "combined", "tidy", "grid-best-response"])]
        strategy: Option<String>,
    },
    /// Evaluates the lie candidates embedded in the scenario.
    LieEval {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["mixed", "semi-coop", "multi-plan"])]
        deal_type: Option<String>,
        #[arg(long, value_parser = ["nash-product", "equal-split"])]
        rule: Option<String>,
    },
    /// Mixed, semi-cooperative and multi-plan deals side by side.
    Hierarchy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["nash-product", "equal-split"])]
        rule: Option<String>,
    },
}

pub struct Report {
    pub text: String,
    pub json: serde_json::Value,
}

enum Failure {
    Usage(String),
    Engine(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Engine(e.to_string())
    }
}

fn budget(flag: Option<usize>, doc: &ScenarioDocument) -> Result<SearchBudget, Failure> {
    if let Some(n) = flag {
        return Ok(SearchBudget::new(n));
    }
    if let Ok(v) = std::env::var(BUDGET_ENV) {
        let n = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{BUDGET_ENV} must be a positive integer, got {v:?}")))?;
        return Ok(SearchBudget::new(n));
    }
    Ok(doc.options().budget.map(SearchBudget::new).unwrap_or_default())
}

fn load(path: &PathBuf) -> Result<ScenarioDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Engine(format!("{}: {e}", path.display())))?;
    ScenarioDocument::parse(&text).map_err(|e| Failure::Engine(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = match &cli.command {
        Command::Plan(c) | Command::Classify(c) => c,
        Command::Negotiate { common, .. }
        | Command::WorthGame { common, .. }
        | Command::LieEval { common, .. }
        | Command::Hierarchy { common, .. } => common,
    };
    let doc = load(&common.scenario)?;
    let budget = budget(common.budget, &doc)?;
    let report = match &cli.command {
        Command::Plan(_) => commands::plan(&doc, budget)?,
        Command::Classify(_) => commands::classify(&doc, budget)?,
        Command::Negotiate { deal_type, rule, hierarchy, seed, .. } => {
            let opts = commands::mechanism_options(&doc, deal_type.as_deref(), rule.as_deref())?;
            commands::negotiate(&doc, budget, opts, *hierarchy, *seed)?
        }
        Command::WorthGame { mechanism, strategy, .. } => {
            commands::worth_game(&doc, budget, mechanism.as_deref(), strategy.as_deref())?
        }
        Command::LieEval { deal_type, rule, .. } => {
            let opts = commands::mechanism_options(&doc, deal_type.as_deref(), rule.as_deref())?;
            commands::lie_eval(&doc, budget, opts)?
        }
        Command::Hierarchy { rule, .. } => {
            let opts = commands::mechanism_options(&doc, None, rule.as_deref())?;
            commands::hierarchy(&doc, budget, opts)?
        }
    };
    print!("{}", report.text);
    if let Some(path) = &common.json {
        let mut body = serde_json::to_string_pretty(&report.json).expect("report serializes");
        body.push('\n');
        std::fs::write(path, body).map_err(|e| Failure::Engine(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Engine(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
