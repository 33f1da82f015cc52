//! `structrates`: rate experiments, margin profiles, decision-region tables
//! and plug-in predictions from the command line.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Common;

#[derive(Parser)]
#[command(name = "structrates", version, about = "Surrogate estimators and convergence-rate experiments for finite-output structured prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML or JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.json and CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for trials (default: available parallelism).
    #[arg(long, env = "STRUCTRATES_WORKERS")]
    workers: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo excess risk against n and the fitted log-log slope.
    RateExperiment {
        #[command(flatten)]
        common: CommonArgs,
        /// Accepted deviation between fitted and theoretical slopes.
        #[arg(long, default_value_t = 0.15)]
        tolerance: f64,
    },
    /// Empirical law of the frontier distance and the fitted margin exponent.
    MarginProfile {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decoded label and frontier distance on a barycentric grid.
    SimplexInspect {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Plug-in predictions for query points from a labelled dataset.
    Predict {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (a, tolerance) = match &cli.command {
        Command::RateExperiment { common, tolerance } => (common, *tolerance),
        Command::MarginProfile { common } | Command::SimplexInspect { common } | Command::Predict { common } => {
            (common, 0.0)
        }
    };
    let args = Common { config: &a.config, out: &a.out, workers: a.workers, seed: a.seed };
    let result = match &cli.command {
        Command::RateExperiment { .. } => commands::rate_experiment_cmd(&args, tolerance),
        Command::MarginProfile { .. } => commands::margin_profile_cmd(&args),
        Command::SimplexInspect { .. } => commands::simplex_inspect_cmd(&args),
        Command::Predict { .. } => commands::predict_cmd(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
