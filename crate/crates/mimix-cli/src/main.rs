//! `mimix` — mutual information estimation for mixed discrete/continuous
//! data, synthetic benchmark generators, and evaluation pipelines.
//!
//! Exit codes: 0 success, 2 input error, 3 parameter error, 4 internal
//! invariant violation.

mod commands;
mod manifest;

use clap::Parser;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mimix",
    version,
    about = "Mutual information estimation for discrete, continuous, and mixed data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Estimate MI between chosen columns of a CSV file
    Estimate(commands::EstimateArgs),
    /// Draw samples from a named synthetic distribution
    #[command(subcommand_value_name = "SPEC")]
    Gen {
        #[command(subcommand)]
        family: commands::GenArgs,
    },
    /// MSE-versus-sample-size sweeps against a generator's ground truth
    Benchmark(commands::BenchmarkArgs),
    /// Rank features by estimated MI with a target; ROC/AUROC when labels exist
    Select(commands::SelectArgs),
    /// Score all gene pairs of an expression matrix against a gold standard
    Netinfer(commands::NetinferArgs),
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Parameter(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Parameter(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Parameter(m) => write!(f, "parameter error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<mimix::Error> for CliError {
    fn from(e: mimix::Error) -> Self {
        match e.class() {
            mimix::ErrorClass::Input => CliError::Input(e.to_string()),
            mimix::ErrorClass::Parameter => CliError::Parameter(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn init_threads() {
    if let Ok(v) = std::env::var("MIMIX_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => commands::run_estimate(&args),
        Command::Gen { family } => commands::run_gen(&family),
        Command::Benchmark(args) => commands::run_benchmark(&args),
        Command::Select(args) => commands::run_select(&args),
        Command::Netinfer(args) => commands::run_netinfer(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
