//! `bellkit` command line: exact embedding reports, Monte Carlo simulation
//! with event logs, joint-distribution feasibility for outcome tables, the
//! closed-form singlet table generator, and the quantum-logic
//! distributivity demo.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 internal error.

mod config;
mod files;
mod report;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use bellkit::chsh::ChshSpace;
use bellkit::jointness::{joint_exists, JointnessError};
use bellkit::qlogic::{distributivity_witness, join, meet, Subspace};
use bellkit::quantum::CVector;
use bellkit::sim::{simulate, CorrelationSource, Estimator, SimulationConfig};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Complex;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Internal(String),
}

impl CliError {
    fn validation(message: String) -> Self {
        CliError::Validation(message)
    }

    fn internal(message: String) -> Self {
        CliError::Internal(message)
    }

    #[cfg(test)]
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Internal(m) => m,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser)]
#[command(
    name = "bellkit",
    version,
    about = "CHSH correlations on one classical probability space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact embedding report for a configured correlation source.
    Exact(ExactArgs),
    /// Monte Carlo run: event log plus empirical estimates.
    Simulate(SimulateArgs),
    /// Joint-distribution feasibility for an outcome table file.
    Joint(JointArgs),
    /// Closed-form singlet outcome table for configured angles.
    Table(ExactArgs),
    /// Distributivity counterexample in the projector lattice of C^2.
    QlogicDemo(DemoArgs),
}

#[derive(Args)]
struct ExactArgs {
    /// Run configuration file (flat key=value).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// Run configuration file (flat key=value).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Trial count (overrides the config).
    #[arg(long, value_name = "N")]
    trials: Option<u64>,
    /// PRNG seed (overrides the config).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker shard count (overrides the config).
    #[arg(long, value_name = "N")]
    shards: Option<u64>,
    /// Write the event log here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Attach the analytic report for the same source to the estimate.
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct JointArgs {
    /// Outcome table file (CSV, header i,j,eps,epsp,p).
    #[arg(value_name = "TABLE")]
    table: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct DemoArgs {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Validation(message)) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
        Err(CliError::Internal(message)) => {
            eprintln!("internal error: {message}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Exact(args) => run_exact(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Joint(args) => run_joint(args),
        Command::Table(args) => run_table(args),
        Command::QlogicDemo(args) => run_demo(args),
    }
}

fn emit(out: Option<&PathBuf>, format: Format, json: serde_json::Value, text: String) -> Result<(), CliError> {
    let rendered = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json)
                .map_err(|e| CliError::internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Text => text,
    };
    match out {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display()))),
    }
}

fn build_space(source: &CorrelationSource, settings: bellkit::chsh::SettingDistribution) -> Result<ChshSpace, CliError> {
    // The table was validated when the source was constructed, so a failure
    // here is a bug rather than bad input.
    ChshSpace::build(source.table(), settings).map_err(|e| CliError::internal(e.to_string()))
}

fn run_exact(args: ExactArgs) -> Result<(), CliError> {
    let config = config::load(&args.config)?;
    let space = build_space(&config.source, config.settings)?;
    let report = space.report();
    emit(
        args.out.as_ref(),
        args.format,
        report::chsh_report_json(&report),
        report::chsh_report_text(&report),
    )
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let config = config::load(&args.config)?;
    let trials = args.trials.or(config.trials).ok_or_else(|| {
        CliError::validation("trials required: set the config key `trials` or pass --trials".into())
    })?;
    let sim_config = SimulationConfig {
        source: config.source,
        settings: config.settings,
        trials,
        seed: args.seed.unwrap_or(config.seed),
        shards: args.shards.unwrap_or(config.shards),
    };
    let stream = simulate(&sim_config).map_err(|e| CliError::validation(e.to_string()))?;

    let mut estimator = Estimator::new();
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                CliError::validation(format!("cannot write {}: {e}", path.display()))
            })?;
            let writer = BufWriter::new(file);
            bellkit::sim::write_event_log(writer, stream.inspect(|r| estimator.push(r)))
                .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
        }
        None => {
            for record in stream {
                estimator.push(&record);
            }
        }
    }

    let exact = if args.exact {
        Some(build_space(&sim_config.source, sim_config.settings)?.report())
    } else {
        None
    };
    let report = estimator.finish(&sim_config.settings, exact);
    emit(
        None,
        args.format,
        report::estimate_report_json(&report),
        report::estimate_report_text(&report),
    )
}

fn run_joint(args: JointArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.table).map_err(|e| {
        CliError::validation(format!("cannot read table {}: {e}", args.table.display()))
    })?;
    let table = files::parse_table(&text)?;
    let result = joint_exists(&table).map_err(|e| match e {
        JointnessError::InconsistentMarginals { .. } => CliError::validation(e.to_string()),
        other => CliError::internal(other.to_string()),
    })?;
    emit(
        args.out.as_ref(),
        args.format,
        report::feasibility_json(&result),
        report::feasibility_text(&result),
    )
}

fn run_table(args: ExactArgs) -> Result<(), CliError> {
    let config = config::load(&args.config)?;
    if !matches!(config.source, CorrelationSource::Angles { .. }) {
        return Err(CliError::validation(
            "the table subcommand needs the four angle keys, not a table path".into(),
        ));
    }
    let rendered = files::render_table(&config.source.table());
    match &args.out {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display()))),
    }
}

fn run_demo(args: DemoArgs) -> Result<(), CliError> {
    let internal = |e: bellkit::qlogic::QlogicError| CliError::internal(e.to_string());
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let v = CVector::from_iterator(2, [Complex::new(half, 0.0), Complex::new(half, 0.0)]);
    let e1 = CVector::from_iterator(2, [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
    let e2 = CVector::from_iterator(2, [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]);
    let p = Subspace::line(&v).map_err(internal)?;
    let p1 = Subspace::line(&e1).map_err(internal)?;
    let p2 = Subspace::line(&e2).map_err(internal)?;
    let demo = report::DemoReport {
        meet_p_p1: meet(&p, &p1).map_err(internal)?,
        meet_p_p2: meet(&p, &p2).map_err(internal)?,
        join_p1_p2: join(&p1, &p2).map_err(internal)?,
        witness: distributivity_witness(&p, &p1, &p2).map_err(internal)?,
        p,
        p1,
        p2,
    };
    emit(
        args.out.as_ref(),
        args.format,
        report::demo_json(&demo),
        report::demo_text(&demo),
    )
}
