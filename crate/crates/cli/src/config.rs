use std::path::{Path, PathBuf};

use reisim::chain::{Coupling, CrystalParams};
use reisim::gate::GateParams;
use reisim::readout::ReadoutParams;
use reisim::scaling::ScalingParams;
use reisim::tomography::TomographyParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Sections every config file must contain.
pub const SECTIONS: [&str; 8] = [
    "run",
    "readout",
    "gate",
    "tomography",
    "scaling",
    "crystal",
    "coupling",
    "chain",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Monte Carlo trials per prepared state.
    pub trials: u64,
}

/// Readout setups: the 1 % baseline and the 10 % high-efficiency variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    /// Detection times scanned, as multiples of the qubit T1.
    pub scan_fractions: Vec<f64>,
    /// Direct-readout distinguishability the background is calibrated to.
    pub calibration_target: f64,
    pub baseline: ReadoutParams,
    pub high_efficiency: ReadoutParams,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            scan_fractions: vec![0.01, 0.015, 0.025, 0.04, 0.06, 0.1, 0.15, 0.2, 0.3],
            calibration_target: 0.93,
            baseline: ReadoutParams::default(),
            high_efficiency: ReadoutParams::high_efficiency(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub target_length: usize,
    /// Crystals in the degree-statistics ensemble.
    pub ensemble: usize,
    pub calibration_target_degree: f64,
    pub calibration_crystals: usize,
    pub calibration_seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            target_length: 5,
            ensemble: 100,
            calibration_target_degree: 5.0,
            calibration_crystals: 100,
            calibration_seed: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run: RunConfig,
    pub readout: ReadoutConfig,
    pub gate: GateParams,
    pub tomography: TomographyParams,
    pub scaling: ScalingParams,
    pub crystal: CrystalParams,
    pub coupling: Coupling,
    pub chain: ChainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            run: RunConfig {
                seed: 1,
                out_dir: PathBuf::from("out"),
                trials: 100_000,
            },
            readout: ReadoutConfig::default(),
            gate: GateParams::default(),
            tomography: TomographyParams::default(),
            scaling: ScalingParams::default(),
            crystal: CrystalParams::default(),
            coupling: Coupling::default(),
            chain: ChainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        for section in SECTIONS {
            if !table.contains_key(section) {
                return Err(CliError::Config(format!("missing section `{section}`")));
            }
        }
        let config: Self =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config types serialize to TOML")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad =
            |section: &str, e: &dyn std::fmt::Display| CliError::Config(format!("[{section}] {e}"));
        if self.run.trials == 0 {
            return Err(CliError::Config("[run] `trials` must be at least 1".into()));
        }
        self.readout
            .baseline
            .validate()
            .map_err(|e| bad("readout.baseline", &e))?;
        self.readout
            .high_efficiency
            .validate()
            .map_err(|e| bad("readout.high_efficiency", &e))?;
        if self.readout.scan_fractions.iter().any(|&f| !(f > 0.0)) {
            return Err(CliError::Config(
                "[readout] `scan_fractions` must be positive".into(),
            ));
        }
        self.gate.validate().map_err(|e| bad("gate", &e))?;
        self.tomography
            .confusion
            .validate()
            .map_err(|e| bad("tomography.confusion", &e))?;
        if !(0.0..=1.0).contains(&self.tomography.rotation_error) {
            return Err(CliError::Config(
                "[tomography] `rotation_error` must lie in [0, 1]".into(),
            ));
        }
        self.scaling.validate().map_err(|e| bad("scaling", &e))?;
        self.crystal.validate().map_err(|e| bad("crystal", &e))?;
        self.coupling.validate().map_err(|e| bad("coupling", &e))?;
        if self.chain.target_length == 0 {
            return Err(CliError::Config(
                "[chain] `target_length` must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// SHA-256 of the effective configuration in canonical TOML form. The
    /// output directory is left out so that relocated runs stay identical.
    pub fn digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.run.out_dir = PathBuf::new();
        hex::encode(Sha256::digest(canonical.to_toml().as_bytes()))
    }
}
