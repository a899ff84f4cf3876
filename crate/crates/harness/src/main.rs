use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use whipchain_harness::{exit, exit_code, parse_config, run_experiment, success_code, RunOptions};

#[derive(Parser)]
#[command(name = "whipchain", version, about = "Run chain dynamics experiments from a config file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Parallel workers for sweep members.
        #[arg(long)]
        workers: Option<usize>,
        /// Replaces the config's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        output_dir,
        workers,
        seed,
        quiet,
    } = Cli::parse().command;
    let code = run(config, output_dir, workers, seed, quiet);
    ExitCode::from(code as u8)
}

fn run(config: PathBuf, output_dir: Option<PathBuf>, workers: Option<usize>, seed: Option<u64>, quiet: bool) -> i32 {
    let mut cfg = match parse_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return exit::CONFIG;
        }
    };
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    let opts = RunOptions {
        config_bytes: std::fs::read(&config).unwrap_or_default(),
        workers: workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    match run_experiment(&cfg, &opts) {
        Ok(outcome) => {
            if !quiet {
                for line in &outcome.summary {
                    println!("{line}");
                }
                println!("wrote {} files to {}", outcome.manifest.files.len(), cfg.output_dir.display());
            }
            if outcome.manifest.violations > 0 {
                eprintln!("{} property violations", outcome.manifest.violations);
            }
            success_code(&outcome)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
