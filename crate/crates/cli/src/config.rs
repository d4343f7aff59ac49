//! Run configuration: what a config file may contain, how command-line flags
//! override it, and the fully resolved form echoed into every output.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorChoice {
    Auto,
    Mean,
    Mom,
}

/// Every knob of every subcommand. Unset fields are omitted from the echo.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bidders: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reserve: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paired: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub old: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub old_sidecar: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_sidecar: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round_robin: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `flags` win over `self`.
    pub fn overridden_by(self, flags: RunConfig) -> RunConfig {
        let base = self;
        let top = flags;
        overlay!(
            base, top, subcommand, dist, m_min, m_max, bidders, reserve, reps, seed, estimator, blocks, paired,
            r_min, r_max, r_steps, old, old_sidecar, new, new_sidecar, round_robin, output, format
        )
    }

    pub fn require<T: Clone>(value: &Option<T>, name: &str) -> Result<T> {
        match value {
            Some(v) => Ok(v.clone()),
            None => bail!("missing required setting `{name}`"),
        }
    }
}
