//! `agency`: deterministic reports over the agency-core computations.
//!
//! One command per invocation; inputs come from JSON files named in a run
//! config or `--set input.<role>=<path>` pairs, every other knob through
//! dotted `--set` keys. Results are a single JSON report (or a CSV table
//! when sweeping one parameter over a value list). No environment variables
//! are consulted; all state flows through flags and config files.

mod commands;
mod config;
mod error;
mod report;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{defaults_help, parse_value, CommandKind, Resolved, RunConfigDoc};
use crate::error::{CliError, EXIT_CODE_HELP};

#[derive(Parser)]
#[command(
    name = "agency",
    version,
    about = "Agency quantities on tabular MDPs: curiosity, empowerment, reward-space \
             distances, function-space measure, and convergence calculators",
    after_help = "Run 'agency --help' for the defaults table and exit codes.",
    after_long_help = long_help()
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

fn long_help() -> String {
    format!("{}\n{EXIT_CODE_HELP}", defaults_help())
}

#[derive(Subcommand)]
enum CliCommand {
    /// Smoothed KL divergence between two distribution files (inputs: p, q)
    Curiosity(CommonArgs),
    /// Channel capacity of a state's n-step action channel (inputs: mdp)
    Empowerment(CommonArgs),
    /// Reward table induced by the agency objective (inputs: mdp, belief[, mesa])
    AgencyReward(CommonArgs),
    /// Distance between two rewards in standardized space (inputs: mdp, reward_f, reward_a)
    StarcDistance(CommonArgs),
    /// Distance from a candidate reward to the ideal agentic reward
    /// (inputs: mdp, belief, candidate[, mesa])
    AgencyMetric(CommonArgs),
    /// Epsilon-tube measure of a function cube (inputs: [cube][, basis, vector])
    Measure(CommonArgs),
    /// Bounded-depth accuracy and complexity calculators (no inputs)
    Convergence(CommonArgs),
    /// Dense versus sparse first-order rate comparison (no inputs)
    Rates(CommonArgs),
    /// Execute the command named by the --config file
    Run(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run config: {"command", "inputs", "seed", "overrides"}
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one parameter (repeatable), e.g. --set starc.normalizer=l2
    /// or --set input.mdp=env.json
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// RNG seed recorded in the report (default 0)
    #[arg(long)]
    seed: Option<u64>,

    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Omit the timestamp so identical runs are byte-identical
    #[arg(long)]
    no_timestamp: bool,

    /// json for single reports (default), csv for sweeps
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Parameter to sweep (a dotted key from the command's surface)
    #[arg(long, value_name = "KEY", requires = "sweep_values")]
    sweep: Option<String>,

    /// Comma-separated values for --sweep
    #[arg(long, value_name = "V1,V2,...", value_delimiter = ',', requires = "sweep")]
    sweep_values: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{}", err.to_json());
        std::process::exit(err.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (kind, args) = match cli.command {
        CliCommand::Curiosity(a) => (Some(CommandKind::Curiosity), a),
        CliCommand::Empowerment(a) => (Some(CommandKind::Empowerment), a),
        CliCommand::AgencyReward(a) => (Some(CommandKind::AgencyReward), a),
        CliCommand::StarcDistance(a) => (Some(CommandKind::StarcDistance), a),
        CliCommand::AgencyMetric(a) => (Some(CommandKind::AgencyMetric), a),
        CliCommand::Measure(a) => (Some(CommandKind::Measure), a),
        CliCommand::Convergence(a) => (Some(CommandKind::Convergence), a),
        CliCommand::Rates(a) => (Some(CommandKind::Rates), a),
        CliCommand::Run(a) => (None, a),
    };

    let doc = match &args.config {
        Some(path) => RunConfigDoc::load(path)?,
        None => RunConfigDoc::default(),
    };
    let command = match (kind, doc.command) {
        (Some(cli_kind), Some(config_kind)) if cli_kind != config_kind => {
            return Err(CliError::Validation(format!(
                "config names the {config_kind} command but {cli_kind} was invoked"
            )));
        }
        (Some(cli_kind), _) => cli_kind,
        (None, Some(config_kind)) => config_kind,
        (None, None) => {
            return Err(CliError::Validation(
                "'run' needs a --config file with a \"command\" field".into(),
            ));
        }
    };
    let resolved = Resolved::build(command, &doc, &args.set, args.seed)?;

    let text = match &args.sweep {
        Some(param) => {
            if args.format == Some(OutputFormat::Json) {
                return Err(CliError::Validation(
                    "sweeps emit csv; drop --format json".into(),
                ));
            }
            run_sweep(&resolved, param, &args.sweep_values)?
        }
        None => {
            if args.format == Some(OutputFormat::Csv) {
                return Err(CliError::Validation(
                    "--format csv is only available with --sweep".into(),
                ));
            }
            let outcome = commands::execute(&resolved)?;
            report::render_json(&resolved, &outcome, !args.no_timestamp)?
        }
    };

    match args.output.as_ref().or(doc.output.as_ref()) {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Re-executes the command once per swept value; the swept key must belong
/// to the command's config surface.
fn run_sweep(
    resolved: &Resolved,
    param: &str,
    values: &[String],
) -> Result<String, CliError> {
    if !resolved.command.surface().contains(&param) {
        return Err(CliError::Validation(format!(
            "unknown sweep parameter '{param}' for the {} command",
            resolved.command
        )));
    }
    if values.is_empty() {
        return Err(CliError::Validation("--sweep-values is empty".into()));
    }
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let mut run = resolved.clone();
        run.set_override(param, parse_value(value));
        let outcome = commands::execute(&run)?;
        rows.push((value.clone(), outcome.row));
    }
    report::render_csv(param, &rows)
}
