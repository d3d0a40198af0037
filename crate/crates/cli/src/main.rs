//! `phasesplit` command-line front end: parameter sweeps, error-scaling
//! tables, cross-validation reports and one-off propagator evaluations,
//! with CSV/JSON output suitable for plotting and archiving.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => EXIT_USAGE,
            AppError::Validation(_) => EXIT_VALIDATION,
            AppError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

pub fn usage<E: std::fmt::Display>(err: E) -> AppError {
    AppError::Usage(err.to_string())
}

#[derive(Parser)]
#[command(
    name = "phasesplit",
    version,
    about = "Two-level dynamics under chirped pulse sequences split by phase jumps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep area, phase jump or depth and tabulate both evaluation routes
    Sweep(SweepArgs),
    /// Relative-error table (2 eps)^N for pulse-probability offsets eps
    ErrorTable(ErrorTableArgs),
    /// Run the seeded cross-module consistency suite
    Validate(ValidateArgs),
    /// Closed-form propagator data for one pulse area
    Exact(ExactArgs),
    /// Numerically propagate one pulse and report the propagator
    Propagate(PropagateArgs),
}

#[derive(Args, Clone, Default)]
pub struct CommonArgs {
    /// JSON config file; explicit flags win over its values
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks; recorded in output headers
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
    /// Worker threads for sweep evaluation
    #[arg(long, value_name = "INT")]
    pub workers: Option<usize>,
    /// Fixed integrator step count per pulse
    #[arg(long, value_name = "INT")]
    pub steps: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum VarArg {
    Area,
    Phase,
    Depth,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum CaseArg {
    A,
    B,
    C,
    D,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum PresetArg {
    /// Two-pulse area scan: case d, phi = pi/2, A in (0, 6pi], 600 points
    FigAreaScan,
    /// Depth scan N = 1, 2, 4, 8 at A = 2, phi = pi/2
    FigDepthScan,
}

#[derive(Args, Clone, Default)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Swept variable
    #[arg(long, value_enum)]
    pub var: Option<VarArg>,
    /// Lower end of the sweep range (area sweeps exclude it from the grid)
    #[arg(long)]
    pub from: Option<f64>,
    /// Upper end of the sweep range
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of grid points (continuous variables)
    #[arg(long)]
    pub points: Option<usize>,
    /// Pair construction case
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// Phase jump in radians (fixed value for non-phase sweeps)
    #[arg(long)]
    pub phi: Option<f64>,
    /// Pulse area A (fixed value for non-area sweeps)
    #[arg(long)]
    pub area: Option<f64>,
    /// Concatenation depth n, giving N = 2^n pulses
    #[arg(long)]
    pub depth: Option<u32>,
    /// Named scan preset; explicit flags override its values
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
}

#[derive(Args, Clone, Default)]
pub struct ErrorTableArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Probability offsets eps, comma separated, each in (0, 0.5)
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    /// Sequence lengths N, comma separated, each a power of two
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<u32>>,
}

#[derive(Args, Clone, Default)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Random draws per check (integrator-backed checks cap themselves)
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Args, Clone, Default)]
pub struct ExactArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Pulse area A
    #[arg(long)]
    pub area: Option<f64>,
    /// Also report the phase-split pair at this jump
    #[arg(long)]
    pub phi: Option<f64>,
    /// Also report the concatenated sequence of 2^n pulses
    #[arg(long)]
    pub depth: Option<u32>,
}

#[derive(Args, Clone, Default)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Propagate the circular-chirp pulse with this area
    #[arg(long)]
    pub area: Option<f64>,
    /// Propagate a tabulated pulse from a CSV file (t,omega[,delta])
    #[arg(long, value_name = "PATH")]
    pub pulse: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep(args) => commands::run_sweep(&args),
        Command::ErrorTable(args) => commands::run_error_table(&args),
        Command::Validate(args) => commands::run_validate(&args),
        Command::Exact(args) => commands::run_exact(&args),
        Command::Propagate(args) => commands::run_propagate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
