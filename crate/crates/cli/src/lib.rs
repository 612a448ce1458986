//! Config-driven front end: each subcommand runs one experiment family and
//! writes CSV/JSON files stamped with the config digest and seed.
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use output::{OutputDir, Provenance};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Model(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "reisim",
    version,
    about = "Rare-earth single-ion readout and gate simulations"
)]
pub struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `run.out_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `run.trials`.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Direct and buffered readout histograms and detection-time scans.
    Readout,
    /// Noisy CNOT sequence: density matrix, trace and fidelity.
    Cnot,
    /// CNOT followed by two-qubit tomography through the readout.
    Tomo,
    /// GHZ fidelity versus qubit number.
    Ghz,
    /// Crystal, interaction graph and chain discovery.
    Chain,
    /// Background-rate and blockade-cutoff calibration; writes a frozen config.
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Readout => "readout",
            Command::Cnot => "cnot",
            Command::Tomo => "tomo",
            Command::Ghz => "ghz",
            Command::Chain => "chain",
            Command::Calibrate => "calibrate",
        }
    }
}

/// Loads the config, applies flag overrides and runs the command. Returns
/// the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("no config given (use --config PATH)".into()))?;
    let source = ExperimentConfig::load(path)?;
    let mut config = source.clone();
    if let Some(seed) = cli.seed {
        config.run.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.run.out_dir = out.clone();
    }
    if let Some(trials) = cli.trials {
        config.run.trials = trials;
    }
    config.validate()?;

    let provenance = Provenance {
        command: cli.command.name(),
        config_sha256: config.digest(),
        seed: config.run.seed,
    };
    let mut out = OutputDir::create(&config.run.out_dir, provenance)?;
    match cli.command {
        Command::Readout => commands::readout(&config, &mut out)?,
        Command::Cnot => commands::cnot(&config, &mut out)?,
        Command::Tomo => commands::tomo(&config, &mut out)?,
        Command::Ghz => commands::ghz(&config, &mut out)?,
        Command::Chain => commands::chain(&config, &mut out)?,
        Command::Calibrate => commands::calibrate(&config, &source, &mut out)?,
    }
    Ok(out.written().to_vec())
}
