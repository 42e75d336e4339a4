//! Front end for `marc-core`: scenario files, command dispatch and report
//! rendering. The `marc` binary is a thin wrapper around [`run`].

pub mod commands;
pub mod exit;
pub mod report;
pub mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

pub use exit::{CliError, ExitCode};
pub use report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "marc",
    version,
    about = "Feasibility checks, sum-rate bounds, input optimization and coding simulations for two-source relay networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies of the source and basic facts about channel and chain.
    Info(InfoArgs),
    /// Evaluate the sufficient conditions of a coding scheme.
    Check(CheckArgs),
    /// Sum-rate outer bound of a semi-orthogonal channel.
    Bound(BoundArgs),
    /// Search over input chains.
    Optimize(OptimizeArgs),
    /// Monte Carlo simulation of a coding scheme.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Info(a) => &a.common,
            Command::Check(a) => &a.common,
            Command::Bound(a) => &a.common,
            Command::Optimize(a) => &a.common,
            Command::Simulate(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario instead of a file.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Random seed; overrides the scenario's [sim] seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Optimizer restarts.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Ascent iterations per restart.
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    /// Exhaustive grid with this step instead of ascent.
    #[arg(long, value_name = "DELTA")]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct InfoArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// thm1, thm2, separation, mac, crbc9, crbc10 or prop1.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Optimize the chain for the scheme instead of using the scenario's.
    #[arg(long)]
    pub optimize: bool,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: Common,
    /// Maximize the bound over independent inputs.
    #[arg(long)]
    pub optimize: bool,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Scheme whose conditions to optimize (sets objective and family).
    #[arg(long)]
    pub scheme: Option<String>,
    /// min_margin_thm1, min_margin_thm2 or somarc_bound.
    #[arg(long)]
    pub objective: Option<String>,
    /// thm1, thm2, separation or product.
    #[arg(long)]
    pub family: Option<String>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Uncoded transmission over the built-in semi-orthogonal example.
    #[arg(long)]
    pub uncoded_cpm: bool,
    /// Optimize a chain for the simulated scheme first.
    #[arg(long)]
    pub optimize: bool,
    /// Sessions to simulate (uncoded mode: samples)
    #[arg(long)]
    pub trials: Option<u64>,
    /// Block length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Source blocks per session
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Binning rate of the first source, bits per letter
    #[arg(long)]
    pub rate1: Option<f64>,
    /// Binning rate of the second source, bits per letter
    #[arg(long)]
    pub rate2: Option<f64>,
    /// Typicality slack
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// absolute or strong.
    #[arg(long)]
    pub slack: Option<String>,
    /// Write one CSV row per decoding step to this file.
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

/// Exit code and the two output streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: ExitCode::Usage.code(), stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.code.code(), stdout: String::new(), stderr: format!("error: {}\n", e.message) },
    }
}

/// Runs a parsed command, on a dedicated thread pool when `--threads` is given.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match cli.command.common().threads {
        None => commands::dispatch(&cli.command),
        Some(0) => Err(CliError::new(ExitCode::Usage, "--threads must be at least 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::new(ExitCode::Budget, format!("cannot start {t} threads: {e}")))?;
            pool.install(|| commands::dispatch(&cli.command))
        }
    }
}
