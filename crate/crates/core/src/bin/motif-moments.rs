use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use motif_moments::commands::{self, CensusMethod};
use motif_moments::config::ExperimentConfig;
use motif_moments::{Error, Result};

/// Default worker count when `--threads` is not given.
const THREADS_ENV: &str = "MOTIF_MOMENTS_THREADS";

#[derive(Parser)]
#[command(version, about = "Exact and simulated moments of motif counts in random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the master seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory of the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact moments and asymptotic expansions.
    Exact,
    /// Overlap tables and overlap polynomials.
    Census {
        #[arg(long, value_enum, default_value_t = Method::Anchored)]
        method: Method,
    },
    /// Volume and surface terms of the mean.
    Asymptotic,
    /// Monte Carlo statistics as CSV.
    Simulate,
    /// Simulated against exact statistics.
    Compare {
        /// Exit with status 4 when a check fails.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Anchored,
    Pairs,
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json serializes");
    text.push('\n');
    text
}

fn run(cli: Cli) -> Result<()> {
    let path = cli
        .config
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut config = ExperimentConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(out) = cli.out {
        config.output_dir = out;
    }
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let (name, text, passed) = match cli.command {
        Command::Exact => ("exact.json", pretty(&commands::exact_report(&config)?), true),
        Command::Census { method } => {
            let method = match method {
                Method::Anchored => CensusMethod::Anchored,
                Method::Pairs => CensusMethod::Pairs,
            };
            ("census.json", pretty(&commands::census(&config, method)?), true)
        }
        Command::Asymptotic => ("asymptotic.json", pretty(&commands::asymptotic(&config)?), true),
        Command::Simulate => ("simulate.csv", commands::simulate(&config)?, true),
        Command::Compare { check } => {
            let (doc, passed) = commands::compare(&config)?;
            ("compare.json", pretty(&doc), passed || !check)
        }
    };
    commands::write_output(&config.output_dir, name, &text)?;
    print!("{text}");
    if !passed {
        return Err(Error::CheckFailed("see failures in compare.json".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
