//! Command-line front end: analyze a system description, sweep instance
//! families, or run a built-in demo. Reports are JSON on stdout or
//! `--out`. Exit codes: 0 success, 2 validation failure, 3 theorem
//! violation (diagonal invariance without unitality — a bug, not input).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qunital_cli::commands::{run_analyze, run_demo, run_sweep, DemoName, Family, EXIT_VALIDATION};

#[derive(Parser)]
#[command(
    name = "qunital",
    version,
    about = "Quantum-channel unitality analysis for system-reservoir evolutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one system description file.
    Analyze(AnalyzeArgs),
    /// Run a seeded ensemble sweep and aggregate the verdicts.
    Sweep(SweepArgs),
    /// Run a named built-in scenario with a fixed seed.
    Demo(DemoArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Path to the JSON system description.
    spec: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Diagonal-invariance tolerance (overrides the description file's value).
    #[arg(long)]
    tol_diag: Option<f64>,
    /// Unitality tolerance (overrides the description file's value).
    #[arg(long)]
    tol_unital: Option<f64>,
    /// Number of seeded probe states for the entropy diagnostics.
    #[arg(long, default_value_t = 5)]
    states: usize,
    /// Seed for the probe states.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the derived channel (Kraus + Choi) to this path.
    #[arg(long)]
    dump_channel: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Instance family to sample.
    #[arg(long, value_enum)]
    family: Family,
    /// Number of trials (at least 1).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// System dimension (ignored by the demon family, which is 2x2).
    #[arg(long, default_value_t = 2)]
    dsys: usize,
    /// Reservoir dimension (ignored by the demon family).
    #[arg(long, default_value_t = 2)]
    dres: usize,
    /// Master seed; trial i uses substream i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    tol_diag: Option<f64>,
    #[arg(long)]
    tol_unital: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    /// Scenario name.
    #[arg(value_enum)]
    name: DemoName,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), String> {
    let json = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    match out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn run() -> Result<u8, String> {
    match Cli::parse().command {
        Command::Analyze(args) => {
            let bytes = std::fs::read(&args.spec)
                .map_err(|e| format!("cannot read {}: {e}", args.spec.display()))?;
            let outcome = run_analyze(
                &bytes,
                args.tol_diag,
                args.tol_unital,
                args.states,
                args.seed,
                args.dump_channel.is_some(),
            )?;
            emit(&outcome.report, args.out.as_ref())?;
            if let (Some(path), Some(dump)) = (&args.dump_channel, &outcome.channel_dump) {
                emit(dump, Some(path))?;
            }
            Ok(outcome.exit)
        }
        Command::Sweep(args) => {
            let outcome = run_sweep(
                args.family,
                args.trials,
                args.dsys,
                args.dres,
                args.seed,
                args.tol_diag,
                args.tol_unital,
            )?;
            emit(&outcome.report, args.out.as_ref())?;
            Ok(outcome.exit)
        }
        Command::Demo(args) => {
            let outcome = run_demo(args.name)?;
            emit(&outcome.report, args.out.as_ref())?;
            Ok(outcome.exit)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
