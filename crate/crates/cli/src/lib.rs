//! Command-line workbench over `cpm-core`.
//!
//! Exit codes: 0 confirmed, 1 negative but valid, 2 counterexample,
//! 64 usage or malformed input, 65 invalid data, 74 I/O, 75 budget.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod commands;
pub mod error;
pub mod formats;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "cpm-workbench", version, about = "Classical structures in CPM categories: checks, searches and simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full condition report on a basis file.
    CheckBasis(CheckBasisArgs),
    /// Print the Pauli-basis counterexample numbers.
    PauliDemo,
    /// Randomized search for CP but non-canonical bases.
    Search(SearchArgs),
    /// Enumerate CP classical structures on a doubled finite set.
    RelEnumerate(RelArgs),
    /// Parallel versus sequential phase estimation.
    #[command(subcommand)]
    Metrology(MetrologyCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckBasisArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Skip the orthonormality check on load.
    #[arg(long)]
    pub no_validate: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=4))]
    pub n: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "CPM_WORKBENCH_THREADS")]
    #[serde(skip)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RelArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=3))]
    pub size: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = cpm_core::rel::DEFAULT_CAP)]
    pub cap: u64,
    /// Remove the candidate cap.
    #[arg(long)]
    pub no_cap: bool,
    #[arg(long, default_value_t = 0)]
    pub start_partition: usize,
    #[arg(long, env = "CPM_WORKBENCH_THREADS")]
    #[serde(skip)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum MetrologyCommand {
    /// Probabilities and Fisher information over a phase grid (CSV).
    Sweep(SweepArgs),
    /// Compare the parallel and sequential scalars over permutations.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Phase generator: at angle phi the phases are `phases * phi`
    /// (default `0,1,...,n-1`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phases: Option<Vec<f64>>,
    /// Dephasing weights (default: no dephasing).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi_min: f64,
    #[arg(long, default_value_t = std::f64::consts::PI, allow_hyphen_values = true)]
    pub phi_max: f64,
    #[arg(long, default_value_t = 2001)]
    pub steps: usize,
    /// CSV destination; a `.manifest.json` file is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Fixed phases for every map (random when omitted).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phases: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Custom map file used for every factor instead of dephasing maps.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub perms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_USAGE } else { error::EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
