use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ringlab_cli::{run_scenario, Command, RunOptions};

/// Planetary-ring laboratory scenario runner.
#[derive(Debug, Parser)]
#[command(name = "ringlab", version)]
struct Cli {
    /// Pipeline to run.
    #[arg(value_enum)]
    command: Command,
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides RINGLAB_SEED and the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; replaced atomically on success.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Suppress warnings and the summary.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions { seed: cli.seed, out: cli.out, threads: cli.threads, quiet: cli.quiet };
    match run_scenario(&cli.config, cli.command, &opts) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
