//! Run configuration files.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluator::{SweepSpec, SweepVariable};
use crate::feasibility::PRange;
use crate::matproc::DEFAULT_RANK_TOL;
use crate::netcfg::NetworkConfig;
use crate::profile::FeedbackProfile;
use crate::quantizer::QuantizerOptions;
use crate::solver::SolverOptions;

/// The only schema version understood.
pub const SCHEMA_VERSION: u32 = 1;

fn default_tol() -> f64 {
    DEFAULT_RANK_TOL
}

fn default_designer() -> String {
    "greedy".to_string()
}

fn default_verify_tol() -> f64 {
    1e-6
}

fn default_schemes() -> Vec<String> {
    ["proposed", "baseline1", "baseline2", "baseline3"].map(String::from).to_vec()
}

/// `design` section.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    /// Designer name.
    #[serde(default = "default_designer")]
    pub designer: String,
}

impl Default for DesignSection {
    fn default() -> Self {
        Self { designer: default_designer() }
    }
}

/// `check` section.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    /// Checkers to run; all registered ones when absent.
    #[serde(default)]
    pub checkers: Option<Vec<String>>,
    /// Stream-index range of the max-flow graph.
    #[serde(default)]
    pub p_range: PRange,
}

/// `solve` section.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    /// Solver settings; the seed is replaced by the run seed.
    #[serde(default)]
    pub solver: SolverOptions,
    /// Tolerance of the alignment check on the true channels.
    #[serde(default = "default_verify_tol")]
    pub verify_tol: f64,
    /// Quantize the feedback with this many bits before solving.
    #[serde(default)]
    pub total_bits: Option<u32>,
    /// Quantizer settings.
    #[serde(default)]
    pub quantizer: QuantizerOptions,
    /// Also report the sum rate at this SNR.
    #[serde(default)]
    pub snr_db: Option<f64>,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), verify_tol: default_verify_tol(), total_bits: None, quantizer: QuantizerOptions::default(), snr_db: None }
    }
}

/// `sweep` section.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Schemes in output order.
    #[serde(default = "default_schemes")]
    pub schemes: Vec<String>,
    /// Swept quantity.
    pub variable: SweepVariable,
    /// Its values.
    pub values: Vec<f64>,
    /// SNR when sweeping bits.
    #[serde(default)]
    pub snr_db: Option<f64>,
    /// Bits when sweeping SNR; absent means unquantized feedback.
    #[serde(default)]
    pub total_bits: Option<u32>,
    /// Channel draws per point.
    pub trials: usize,
    /// Solver settings.
    #[serde(default)]
    pub solver: SolverOptions,
    /// Quantizer settings.
    #[serde(default)]
    pub quantizer: QuantizerOptions,
}

impl SweepSection {
    /// The sweep without its scheme list.
    pub fn spec(&self) -> SweepSpec {
        SweepSpec {
            variable: self.variable,
            values: self.values.clone(),
            snr_db: self.snr_db,
            total_bits: self.total_bits,
            trials: self.trials,
            solver: self.solver,
            quantizer: self.quantizer,
        }
    }
}

/// `output` section.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory, relative to the working directory.
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Schema version; must be 1.
    pub schema: u32,
    /// The network.
    pub network: NetworkConfig,
    /// Profile for `check`, `solve` and the `profile` scheme.
    #[serde(default)]
    pub profile: Option<FeedbackProfile>,
    /// Run seed, overridden by `--seed`.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Relative rank tolerance of feasibility tests.
    #[serde(default = "default_tol")]
    pub rank_tol: f64,
    /// Design settings.
    #[serde(default)]
    pub design: DesignSection,
    /// Check settings.
    #[serde(default)]
    pub check: CheckSection,
    /// Solve settings.
    #[serde(default)]
    pub solve: SolveSection,
    /// Sweep settings (required by `sweep`).
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    /// Output settings.
    #[serde(default)]
    pub output: OutputSection,
}

/// A configuration together with the SHA-256 of its file contents.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    /// Parsed configuration.
    pub config: RunConfig,
    /// Lower-case hex SHA-256 of the raw file.
    pub sha256: String,
}

impl RunConfig {
    /// Parses and validates configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("cannot parse config: {e}")))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema {} (expected {SCHEMA_VERSION})", cfg.schema)));
        }
        if !(cfg.rank_tol > 0.0) {
            return Err(Error::Config("rank_tol must be positive".into()));
        }
        if let Some(p) = &cfg.profile {
            p.validate(&cfg.network).map_err(|e| Error::Config(format!("profile does not fit the network: {e}")))?;
        }
        if let Some(s) = &cfg.sweep {
            if s.schemes.is_empty() {
                return Err(Error::Config("sweep needs at least one scheme".into()));
            }
            s.spec().validate()?;
        }
        Ok(cfg)
    }
}

/// Reads, hashes and parses a configuration file.
pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let bytes = std::fs::read(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
    Ok(LoadedConfig { config: RunConfig::parse(text)?, sha256 })
}
