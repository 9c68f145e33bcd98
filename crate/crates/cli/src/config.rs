//! Experiment configuration: an optional JSON or TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionKind {
    Double,
    Extended,
}

/// Every key a config file may set. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Option<String>,
    pub densities: Option<Vec<String>>,
    pub beta: Option<f64>,
    pub b: Option<f64>,
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    pub k: Option<Vec<usize>>,
    pub n_max: Option<usize>,
    pub d: Option<Vec<usize>>,
    pub d_max: Option<usize>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub digits: Option<u32>,
    pub precision: Option<PrecisionKind>,
    pub grid: Option<usize>,
    pub pairs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub which: Option<u8>,
    pub atoms: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub eigenvalues: Option<Vec<f64>>,
    pub compare_double: Option<bool>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON or TOML file with default settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Density or spectrum family, e.g. chebyshev, example3:0.5, example11, example12.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Right end of the spectrum interval.
    #[arg(long)]
    pub b: Option<f64>,
    /// Number of eigenvalues.
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    /// Polynomial degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Outlier counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Additive constant in the exponent of every bound.
    #[arg(long = "C", allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Significant decimal digits of the extended precision runs.
    #[arg(long)]
    pub digits: Option<u32>,
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionKind>,
    /// Grid size for sweeps and error tables.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output file or directory, depending on the command.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

pub fn load_file(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    if is_json {
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}

impl ExperimentConfig {
    /// File settings with every flag that was given laid over them.
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let mut cfg = match &args.config {
            Some(p) => load_file(p)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! over {
            ($($field:ident),*) => {
                $(if let Some(v) = args.$field.clone() { cfg.$field = Some(v); })*
            };
        }
        over!(family, beta, b, big_n, n_max, c, digits, precision, grid, out, format);
        if !args.k.is_empty() {
            cfg.k = Some(args.k.clone());
        }
        if !args.d.is_empty() {
            cfg.d = Some(args.d.clone());
        }
        Ok(cfg)
    }

    pub fn offset(&self) -> Result<f64, CliError> {
        let c = self.c.unwrap_or(0.0);
        if !c.is_finite() {
            return Err(CliError::Validation("C must be finite".into()));
        }
        Ok(c)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}
