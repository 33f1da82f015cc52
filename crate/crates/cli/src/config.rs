//! Strict TOML/JSON config loading and per-command settings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use structrates_core::diagnostics::FitWindow;
use structrates_core::estimators::KernelSpec;
use structrates_core::SyntheticProblem;

use crate::error::CliError;

/// Parses `path` as TOML or JSON by extension, rejecting unknown keys.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let malformed = |message: String| CliError::Config { path: path.to_path_buf(), message };
    let text = fs::read_to_string(path).map_err(|e| malformed(format!("cannot read: {e}")))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).map_err(|e| malformed(e.to_string().trim_end().to_owned())),
        Some("json") => serde_json::from_str(&text).map_err(|e| malformed(e.to_string())),
        _ => Err(malformed("unsupported extension, expected .toml or .json".into())),
    }
}

/// Resolves a path from a config file against the config's directory.
pub fn resolve(config_path: &Path, relative: &Path) -> PathBuf {
    if relative.is_absolute() {
        return relative.to_path_buf();
    }
    config_path.parent().unwrap_or(Path::new(".")).join(relative)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Midpoints of the regular partition of the support.
    #[default]
    Grid,
    /// I.i.d. draws from the input law.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub problem: SyntheticProblem,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub seed: u64,
    /// Explicit threshold grid; 50 log-spaced values from 1e-3 to the largest
    /// observed distance when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    #[serde(default)]
    pub fit_window: FitWindow,
    /// Accepted deviation of the fitted exponent from the problem's.
    #[serde(default = "default_alpha_tolerance")]
    pub tolerance: f64,
}

fn default_points() -> usize {
    100_000
}

fn default_alpha_tolerance() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexConfig {
    /// Loss file (JSON or CSV); the three-label example loss when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<PathBuf>,
    /// Barycentric grid with weights `i / resolution`.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PredictEstimator {
    Knn { k: usize },
    Krr { kernel: KernelSpec, lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    pub loss: PathBuf,
    pub train: PathBuf,
    pub queries: PathBuf,
    pub estimator: PredictEstimator,
}
