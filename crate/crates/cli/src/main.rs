mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use safeswitch_core::certificates::BoundMethod;
use safeswitch_core::simulation::DisturbanceShape;
use safeswitch_core::walker::WalkerMode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INVALID_SIGNAL: i32 = 3;

/// Certify, validate and simulate switching among movement primitives.
///
/// Exit codes: 0 success or feasible, 1 input error, 2 infeasible
/// certificate, 3 invalid switching signal. Every option can also be set
/// through a `SAFESWITCH_<OPTION>` environment variable (for example
/// `SAFESWITCH_SEED`, `SAFESWITCH_OUT_DIR`) or in the `--config` file.
#[derive(Debug, Parser)]
#[command(name = "safeswitch", version)]
pub struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true, env = "SAFESWITCH_SEED")]
    pub seed: Option<u64>,
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true, env = "SAFESWITCH_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// JSON file with option values.
    #[arg(long, global = true, env = "SAFESWITCH_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a dwell-time certificate for a primitive library.
    Certify(CertifyArgs),
    /// Check a switching signal against a dwell-time budget.
    Validate(ValidateArgs),
    /// Monte Carlo campaign of the switched system under a certificate.
    Simulate(SimulateArgs),
    /// Run a leader-following walker scenario.
    Scenario(ScenarioArgs),
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, env = "SAFESWITCH_LIBRARY")]
    pub library: Option<PathBuf>,
    /// Bound method for ω and μ: analytic or grid.
    #[arg(long, env = "SAFESWITCH_METHOD")]
    pub method: Option<BoundMethod>,
    /// Grid points per axis for grid bounds and containment fallbacks.
    #[arg(long, env = "SAFESWITCH_RESOLUTION")]
    pub resolution: Option<usize>,
    /// Target N̄₀.
    #[arg(long, env = "SAFESWITCH_N0")]
    pub n0: Option<u32>,
    /// ε in (λ, 1); defaults to λ + 0.9(1 − λ).
    #[arg(long, env = "SAFESWITCH_EPSILON")]
    pub epsilon: Option<f64>,
    /// Number of log-spaced κ values in the sweep.
    #[arg(long, env = "SAFESWITCH_KAPPA_COUNT")]
    pub kappa_count: Option<usize>,
    /// Episodes per amplitude in the disturbance-margin search; 0 skips it.
    #[arg(long, env = "SAFESWITCH_MARGIN_TRIALS")]
    pub margin_trials: Option<usize>,
    #[arg(long, env = "SAFESWITCH_MARGIN_HORIZON")]
    pub margin_horizon: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// CSV with columns `k,id`.
    #[arg(long, env = "SAFESWITCH_SIGNAL")]
    pub signal: Option<PathBuf>,
    /// Take the budget from a certificate.
    #[arg(long, env = "SAFESWITCH_CERTIFICATE")]
    pub certificate: Option<PathBuf>,
    #[arg(long, env = "SAFESWITCH_N0")]
    pub n0: Option<f64>,
    #[arg(long, env = "SAFESWITCH_NA")]
    pub na: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, env = "SAFESWITCH_LIBRARY")]
    pub library: Option<PathBuf>,
    #[arg(long, env = "SAFESWITCH_CERTIFICATE")]
    pub certificate: Option<PathBuf>,
    #[arg(long, env = "SAFESWITCH_EPISODES")]
    pub episodes: Option<usize>,
    #[arg(long, env = "SAFESWITCH_HORIZON")]
    pub horizon: Option<usize>,
    /// Disturbance amplitude.
    #[arg(long, env = "SAFESWITCH_AMPLITUDE")]
    pub amplitude: Option<f64>,
    /// `ball`: uniform in the amplitude ball; `sphere`: norm equal to the
    /// amplitude at every step.
    #[arg(long, env = "SAFESWITCH_SHAPE")]
    pub shape: Option<DisturbanceShape>,
    /// Number of episode traces written as CSV.
    #[arg(long, env = "SAFESWITCH_KEEP_TRACES")]
    pub keep_traces: Option<usize>,
    /// Initial states are drawn from the intersection of sublevel sets at
    /// this level; defaults to the certificate's ω.
    #[arg(long, env = "SAFESWITCH_INITIAL_LEVEL")]
    pub initial_level: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario document.
    #[arg(env = "SAFESWITCH_SCENARIO")]
    pub scenario: Option<PathBuf>,
    /// `adaptive` or `fixed:<id>`; overrides the document.
    #[arg(long, env = "SAFESWITCH_MODE")]
    pub mode: Option<WalkerMode>,
    #[arg(long, env = "SAFESWITCH_STRIDES")]
    pub strides: Option<usize>,
    #[arg(long, env = "SAFESWITCH_DEAD_ZONE")]
    pub dead_zone: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
