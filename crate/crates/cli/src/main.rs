//! Command-line front end: slope evaluation, modulation-parameter
//! optimization, frequency sweeps, figure-data export, low-frequency
//! stationarity diagnostics, and the spectral-vs-time-domain verification
//! suite. Emits deterministic CSV or JSON for external plotting tools.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure (including a
//! failed verification run).

mod commands;
mod config;
mod grid;
mod output;
mod suite;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, missing required settings.
    Usage(String),
    /// Numerical or I/O failure while producing results.
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) | Self::Failure(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<modspec::Error> for CliError {
    fn from(e: modspec::Error) -> Self {
        Self::Failure(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Failure(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "modspec",
    version,
    about = "Lock-in error-signal models for phase-modulation spectroscopy"
)]
struct Cli {
    /// Optional key=value config file; explicit flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Error-signal slope at line center, or a detuning sweep of the error signal
    Slope(commands::SlopeArgs),
    /// Maximize the slope over the modulation index at one frequency
    Optimize(commands::OptimizeArgs),
    /// Slope optima across a modulation-frequency grid
    Sweep(commands::SweepArgs),
    /// Export normalized slope curves and the optimal index/phase curves
    Figure2(commands::Figure2Args),
    /// Low-frequency stationarity diagnostic (deviation and slope constancy)
    Stationarity(commands::StationarityArgs),
    /// Compare the spectral formulas against the time-domain oracle
    Verify(commands::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let file = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Slope(args) => commands::run_slope(args, &file),
        Command::Optimize(args) => commands::run_optimize(args, &file),
        Command::Sweep(args) => commands::run_sweep(args, &file),
        Command::Figure2(args) => commands::run_figure2(args, &file),
        Command::Stationarity(args) => commands::run_stationarity(args, &file),
        Command::Verify(args) => commands::run_verify(args, &file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
