//! Versioned JSON experiment configuration.
//!
//! ```json
//! {
//!   "schema": "rig-lab/1",
//!   "model": { "explicit": { "er": { "n": 1000, "q": 0.01 } } },
//!   "property": { "kind": "k_connected", "k": 1 },
//!   "trials": 500,
//!   "seed": 7,
//!   "output": { "csv": "trials.csv", "summary": "summary.json" }
//! }
//! ```
//!
//! Unknown keys anywhere in the document are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{ExperimentConfig, ModelSource, SweepAxis, DEFAULT_TRIALS, SCHEMA};
use crate::properties::{DecisionBudget, PropertyKind};

/// Environment variable consulted for the base seed when none is given.
pub const SEED_ENV: &str = "RIG_LAB_SEED";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: String,
    pub model: ModelSource,
    pub property: PropertyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<DecisionBudget>,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub record_timings: bool,
    /// Axis used by the `sweep` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxis>,
}

impl ConfigFile {
    /// Parses and validates a config document.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(Error::Config(format!(
                "schema: expected \"{SCHEMA}\", found \"{}\"",
                cfg.schema
            )));
        }
        if cfg.trials == Some(0) {
            return Err(Error::Config("trials: must be at least 1".into()));
        }
        if cfg.workers == Some(0) {
            return Err(Error::Config("workers: must be at least 1".into()));
        }
        cfg.property
            .validate()
            .map_err(|e| Error::Config(format!("property: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Builds the experiment, taking the seed from `RIG_LAB_SEED` when the
    /// file has none.
    pub fn to_experiment(&self) -> Result<ExperimentConfig> {
        let seed = match self.seed {
            Some(s) => s,
            None => seed_from_env()?.unwrap_or(0),
        };
        Ok(ExperimentConfig {
            model: self.model.clone(),
            property: self.property,
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            seed,
            budget: self.budget.unwrap_or_default(),
            record_timings: self.record_timings,
            workers: self.workers,
        })
    }
}

/// The base seed from `RIG_LAB_SEED`, if set.
pub fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{SEED_ENV}: not an unsigned integer: {v:?}"))),
        Err(_) => Ok(None),
    }
}
