//! Experiment harness around the core library: reproduces the response
//! curves, simulation overlays, estimator studies, and file-based estimation
//! as CSV/JSON artifacts with full seed and config provenance.

mod commands;
mod config;
mod csvio;
mod manifest;
mod obsfile;

pub use config::{EffectiveRun, ExperimentConfig, ExperimentKind, Profile};
pub use manifest::{read_manifest, RunManifest};
pub use obsfile::{read_observations, write_observations, ObservationFile};

use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Exit code contract: 0 success, 2 validation error, 3 numerical
/// non-convergence, 1 anything else (I/O and friends).
#[derive(Debug)]
pub enum HarnessError {
    Validation(String),
    Numerical(String),
    Other(anyhow::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Validation(m) => write!(f, "validation error: {m}"),
            HarnessError::Numerical(m) => write!(f, "numerical non-convergence: {m}"),
            HarnessError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for HarnessError {
    fn from(e: anyhow::Error) -> Self {
        HarnessError::Other(e)
    }
}

pub type HarnessResult<T> = Result<T, HarnessError>;

fn validation<T>(msg: impl Into<String>) -> HarnessResult<T> {
    Err(HarnessError::Validation(msg.into()))
}

fn numerical<T>(msg: impl Into<String>) -> HarnessResult<T> {
    Err(HarnessError::Numerical(msg.into()))
}

/// Map any core-library error into the numerical-non-convergence exit class.
fn numerical_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Numerical(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "dualrx", version, about = "Two-receiver channel experiments: response curves, simulation overlays, estimator studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Experiment config (JSON); a previous run's manifest is also accepted.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed; overrides the config/manifest value.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for CSV/JSON artifacts and the run manifest.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Override trial/realization counts.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Desk-scale profile (fewer trials/realizations).
    #[arg(long, conflicts_with = "paper")]
    pub fast: bool,
    /// Publication-grade profile (2000 realizations/trials).
    #[arg(long)]
    pub paper: bool,
}

impl CommonArgs {
    pub fn profile(&self) -> Option<Profile> {
        if self.fast {
            Some(Profile::Fast)
        } else if self.paper {
            Some(Profile::Paper)
        } else {
            None
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analytic response curves: absorbed counts, windowed signal, asymptote.
    Cir(CommonArgs),
    /// Particle-simulation ensemble overlaid on the analytic windowed signal.
    Overlay(CommonArgs),
    /// Normalized estimator MSE and the normalized CRLB versus S.
    Mse(CommonArgs),
    /// Minimum S at which difference estimation beats the stronger receiver,
    /// per noise mean.
    MinS(CommonArgs),
    /// Point estimates (difference + per-receiver) from an observation file.
    Estimate(CommonArgs),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Cir(_) => ExperimentKind::CirCurve,
            Command::Overlay(_) => ExperimentKind::SignalOverlay,
            Command::Mse(_) => ExperimentKind::MseVsS,
            Command::MinS(_) => ExperimentKind::MinSVsXi,
            Command::Estimate(_) => ExperimentKind::Estimate,
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Cir(a) | Command::Overlay(a) | Command::Mse(a) | Command::MinS(a) | Command::Estimate(a) => a,
        }
    }
}

/// Parse argv and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version printing
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dualrx: {e}");
            e.exit_code()
        }
    }
}

/// Run one already-parsed command.
pub fn execute(command: &Command) -> HarnessResult<()> {
    let args = command.args();
    let run = config::EffectiveRun::load(command.kind(), args)?;
    match command {
        Command::Cir(_) => commands::cir::run(&run),
        Command::Overlay(_) => commands::overlay::run(&run),
        Command::Mse(_) => commands::mse::run(&run),
        Command::MinS(_) => commands::min_s::run(&run),
        Command::Estimate(_) => commands::estimate::run(&run),
    }
}
