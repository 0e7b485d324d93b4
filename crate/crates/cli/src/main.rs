mod commands;
mod config;
mod output;
mod solve;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qhparticle_core::SolveError;

use crate::commands::{Outcome, ResidualFailure};
use crate::config::{RunConfig, SweepConfig};
use crate::output::Format;
use crate::verify::VerificationFailed;

#[derive(Parser)]
#[command(
    name = "qhparticle",
    version,
    about = "Free complex and quaternionic particles: solve, scatter, classify, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wave numbers, amplitude ratios, stationarity and residuals.
    Dispersion(RunArgs),
    /// Reflection and transmission at a two-region step.
    Scatter(RunArgs),
    /// Oracle checks; exits 5 if any fails.
    Verify(RunArgs),
    /// Stationarity classification.
    Classify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `name=from:to:steps`, overriding `[sweep]` in the config.
    #[arg(long)]
    sweep: Option<String>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_BRANCH: u8 = 3;
const EXIT_CONSTRAINT: u8 = 4;
const EXIT_VERIFY: u8 = 5;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<VerificationFailed>() || cause.is::<ResidualFailure>() {
            return EXIT_VERIFY;
        }
        if let Some(e) = cause.downcast_ref::<SolveError>() {
            return match e {
                SolveError::BranchInfeasible { .. } | SolveError::OrientationMismatch { .. } => EXIT_BRANCH,
                SolveError::ConstraintUnsatisfiable { .. } | SolveError::ConstraintViolation { .. } => EXIT_CONSTRAINT,
                _ => EXIT_CONFIG,
            };
        }
    }
    EXIT_CONFIG
}

fn write_table(outcome: &Outcome, args: &RunArgs) -> anyhow::Result<()> {
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            outcome.table.write(args.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            outcome.table.write(args.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

type Handler = fn(&RunConfig, Option<&SweepConfig>) -> anyhow::Result<Outcome>;

fn run(cli: Cli) -> anyhow::Result<()> {
    let (args, f): (&RunArgs, Handler) = match &cli.command {
        Command::Dispersion(a) => (a, commands::dispersion),
        Command::Scatter(a) => (a, commands::scatter),
        Command::Verify(a) => (a, verify::verify),
        Command::Classify(a) => (a, commands::classify),
    };
    let cfg = RunConfig::from_path(&args.config)?;
    let sweep = args.sweep.as_deref().map(SweepConfig::parse).transpose()?;
    let outcome = f(&cfg, sweep.as_ref())?;
    write_table(&outcome, args)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
