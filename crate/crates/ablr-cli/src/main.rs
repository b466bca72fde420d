//! `ablr` — batch front end for the multi-task surrogate benchmarks.
//!
//! Exit codes: 0 on success, 1 on configuration or validation errors,
//! 2 when a benchmark completed with some failed runs (partial results).

mod commands;
mod config;
mod hexfloat;
mod model_io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "ablr",
    version,
    about = "Multi-task Bayesian optimization: benchmark runs, table checks, and surrogate fit/predict"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config and write result CSVs.
    Run {
        /// Experiment config (JSON document).
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Worker threads (default: all cores). 1 guarantees fully serial,
        /// deterministic execution order.
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
        /// Replace every seed list in the config with this single seed.
        #[arg(long, value_name = "N")]
        seed_override: Option<u64>,
        /// Output directory (overrides the config's "out" key).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Check an evaluation-table CSV: schema, duplicate configurations,
    /// finite signals. Prints row and column counts.
    Validate {
        /// Table file to check.
        #[arg(value_name = "TABLE")]
        table: PathBuf,
    },
    /// Fit a multi-task surrogate from history files and save it as JSON.
    Fit {
        /// Fit config (JSON document).
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Where to write the model file.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Load a saved model and emit mean/variance for queried configurations.
    Predict {
        /// Saved model file.
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// Query CSV whose columns are the model's dimension names.
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
        /// Output CSV path (default: stdout).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print version and file-format information.
    Version,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems fall under the config-error exit code; help and
            // version requests are successes.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run { config, jobs, seed_override, out } => {
            commands::cmd_run(&config, jobs, seed_override, out)
        }
        Command::Validate { table } => commands::cmd_validate(&table),
        Command::Fit { config, out } => commands::cmd_fit(&config, &out),
        Command::Predict { model, data, out } => {
            commands::cmd_predict(&model, &data, out.as_deref())
        }
        Command::Version => commands::cmd_version(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
