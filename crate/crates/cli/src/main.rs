use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geophase::harness::{emit, load_scenario, run_scenario, HarnessError, OutputFormat, Overrides, RunReport};

/// Simulate single-qubit geometric phase gates and analyze their phases.
#[derive(Parser)]
#[command(name = "geophase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report.
    Run {
        scenario: PathBuf,
        /// Report path; `.csv` selects CSV, anything else JSON. Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Steps per segment, overriding the scenario.
        #[arg(long)]
        steps: Option<usize>,
        /// Step-doubling tolerance on U(τ).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the noise sweep of a scenario with the given seed.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
}

fn write_report(report: &RunReport, out: Option<&Path>) -> Result<(), HarnessError> {
    match out {
        Some(path) => emit(report, OutputFormat::from_path(path), path),
        None => {
            print!("{}", report.to_json());
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { scenario, out, steps, tol } => {
            let s = load_scenario(&scenario)?;
            let report = run_scenario(&s, &Overrides { steps, tolerance: tol, seed: None })?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            write_report(&report, out.as_deref())
        }
        Command::Sweep { scenario, seed, out, steps } => {
            let s = load_scenario(&scenario)?;
            if s.noise.is_none() {
                return Err(HarnessError::schema("noise", "sweep requires a noise block"));
            }
            let report = run_scenario(&s, &Overrides { steps, tolerance: None, seed: Some(seed) })?;
            write_report(&report, out.as_deref())
        }
        Command::Validate { scenario } => {
            let s = load_scenario(&scenario)?;
            println!("{}: ok ({} analyses)", s.id, s.analyses.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
