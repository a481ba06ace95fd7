//! `admlab`: run one computation from a JSON scenario and write a JSON
//! report plus CSV tables.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 certificate
//! violation or numerical failure.

mod commands;
mod output;
mod scenario;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    OrliczNorm,
    Simulate,
    Adm,
    Weiss,
    Sqfct,
    Counterexample,
    Iss,
    Iiss,
    ShiftDemo,
    ProbeBoundedness,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::OrliczNorm => "orlicz-norm",
            Command::Simulate => "simulate",
            Command::Adm => "adm",
            Command::Weiss => "weiss",
            Command::Sqfct => "sqfct",
            Command::Counterexample => "counterexample",
            Command::Iss => "iss",
            Command::Iiss => "iiss",
            Command::ShiftDemo => "shift-demo",
            Command::ProbeBoundedness => "probe-boundedness",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "admlab", version, about = "Admissibility and ISS laboratory for diagonal control systems")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// output directory (default: $ADMLAB_OUT, then the scenario's output_dir, then ./admlab-out)
    #[arg(long, env = "ADMLAB_OUT")]
    out: Option<PathBuf>,
    /// overrides the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// overrides the number of modes
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("certificate violation: {0}")]
    Violation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) | CliError::Violation(_) => 2,
        }
    }
}

impl From<admlab_core::Error> for CliError {
    fn from(e: admlab_core::Error) -> Self {
        use admlab_core::Error as E;
        match e {
            E::CertificateViolation(d) => CliError::Violation(d.to_string()),
            E::QuadratureNonConvergence { .. }
            | E::LuxemburgNoBracket { .. }
            | E::InconsistentBounds { .. }
            | E::DivergentSquareFunction { .. }
            | E::NonIntegrable(_) => CliError::Numeric(e.to_string()),
            E::Io(_) => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn run(args: Args) -> Result<(), CliError> {
    let loaded = scenario::load(&args.scenario)?;
    let dir = args
        .out
        .clone()
        .or_else(|| loaded.scenario.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("admlab-out"));
    let sink = output::Sink::new(dir)?;
    let ctx = commands::Context {
        scenario: &loaded.scenario,
        seed: args.seed.or(loaded.scenario.seed),
        modes: args.modes,
        sink: &sink,
    };
    let outcome = commands::dispatch(args.command, &ctx)?;
    let report = output::Report {
        command: args.command.name(),
        scenario: output::ScenarioInfo {
            name: loaded.scenario.name.clone(),
            sha256: loaded.sha256.clone(),
        },
        versions: output::versions(),
        seed: ctx.seed,
        modes: outcome.modes,
        result: outcome.result,
    };
    sink.json(&format!("{}.json", args.command.name()), &report)?;
    for t in &outcome.tables {
        sink.table(args.command.name(), t)?;
    }
    if !args.quiet {
        println!("{}: {}", args.command.name(), outcome.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("admlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
