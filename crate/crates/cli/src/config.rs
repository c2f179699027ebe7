//! Run configuration: JSON file values, overridden by command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use halfspace_core::halfplane::Correction;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Data as CSV.
    Csv,
    /// Data as JSON.
    Json,
    /// Data as CSV plus an SVG line plot.
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionArg {
    Off,
    Leading,
    Series,
}

impl From<CorrectionArg> for Correction {
    fn from(c: CorrectionArg) -> Self {
        match c {
            CorrectionArg::Off => Correction::Off,
            CorrectionArg::Leading => Correction::Leading,
            CorrectionArg::Series => Correction::Series,
        }
    }
}

/// Every parameter any subcommand reads. A field left out of the file falls
/// back to the flag or the built-in default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gamma: Option<f64>,
    pub slope: Option<f64>,
    pub t_max: Option<f64>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub route_tol: Option<f64>,
    pub horizon: Option<f64>,
    pub lambda: Option<f64>,
    pub strip: Option<f64>,
    pub far_strip: Option<f64>,
    pub width: Option<f64>,
    pub height: Option<f64>,
    pub h: Option<f64>,
    pub perturb: Option<f64>,
    pub correction: Option<CorrectionArg>,
    pub input: Option<PathBuf>,
    pub halfplane: Option<Vec<PathBuf>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }
}

/// Flag value, else file value, else default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Checks that a tolerance-like value is positive and finite.
pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Input(format!("{name} must be positive, got {v}")))
    }
}
