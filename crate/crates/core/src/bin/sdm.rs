use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sdm_core::harness::{load_config, run_experiment, summarize, RunSummary};
use sdm_core::Error;

#[derive(Parser)]
#[command(
    name = "sdm",
    version,
    about = "Run and summarize sequential decision-making experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-seed CSVs plus a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Number of worker threads for the seed fan-out.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        parallel: u64,
    },
    /// Check a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute a finished run's summary and check it against the stored one.
    Summarize {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn print_summary(s: &RunSummary) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(s)?);
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            config,
            out,
            parallel,
        } => {
            let cfg = load_config(&config)?;
            let summary = run_experiment(&cfg, &out, parallel as usize)?;
            print_summary(&summary)
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            println!("ok: {} with {} seed(s)", cfg.kind.as_str(), cfg.seeds.len());
            Ok(())
        }
        Command::Summarize { dir } => print_summary(&summarize(&dir)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Validation(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
