use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use orbgw_cli::selfcheck::{run_selfcheck_with, Faults, Level};
use orbgw_cli::{run_correlator, run_graphs, JobConfig};

#[derive(Parser)]
#[command(name = "orbgw", version, about = "Exact equivariant orbifold Gromov-Witten correlators of [C^r/G]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one correlator by the graph sum.
    Correlator { config: PathBuf },
    /// Run the invariant suites of every module.
    Selfcheck {
        #[arg(long)]
        full: bool,
        /// corrupt the Bernoulli table before checking
        #[arg(long, hide = true)]
        inject_bernoulli_fault: bool,
    },
    /// List the stable graphs a correlator sums over.
    Graphs { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<JobConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    JobConfig::from_json(&text)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Correlator { config } => {
            let doc = run_correlator(&load(&config)?)?;
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(doc.passed())
        }
        Command::Graphs { config } => {
            let doc = run_graphs(&load(&config)?)?;
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(true)
        }
        Command::Selfcheck {
            full,
            inject_bernoulli_fault,
        } => {
            let level = if full { Level::Full } else { Level::Quick };
            let faults = Faults {
                perturb_bernoulli: inject_bernoulli_fault,
            };
            let report = run_selfcheck_with(level, faults);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
