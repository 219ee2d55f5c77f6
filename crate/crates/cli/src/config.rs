//! Run parameters shared by the config file and the command line.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Deserializer, Serialize};

use crate::CliError;

/// Every tunable of every subcommand. Unset fields are `None`; the config
/// file uses the same key names as the long flags (with `_` for `-`).
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Seed for all Monte Carlo streams (required by simulating commands).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Scan scheme: ebel1 or ebel2.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Weight function: constant, linear, cosine-bell or tabulated:t:w,...
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    /// Parameter dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Comma-separated quantile levels.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    /// Monte Carlo replicates.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    /// Brownian grid size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Limit-law discretization: continuous or grid.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discretization: Option<String>,
    /// Input series CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Method: ebel1, ebel2 or bel, optionally with a suffix such as
    /// ebel1:linear or bel:aar. Repeat for several methods.
    #[arg(long = "method")]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub method: Option<Vec<String>>,
    /// Block rule for bare `bel`: ftk, aar or a fixed length.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<String>,
    /// Confidence level.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    /// Quantile table CSV used to calibrate EBEL methods. Repeatable.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub calibration: Option<Vec<PathBuf>>,
    /// Data-generating process, e.g. ma:0.4,-0.6 or ar:0.9@normal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<String>,
    /// Sample size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Largest local alternative c.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_max: Option<f64>,
    /// Spacing of the c grid.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_step: Option<f64>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Replace an existing output file.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overwrite: Option<bool>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

fn one_or_many<'de, D, T>(de: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Some(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    }))
}

/// Keys that do not affect results and are left out of output headers.
const OPERATIONAL_KEYS: [&str; 2] = ["overwrite", "threads"];

impl Params {
    /// Parses a TOML config file body.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {}", e.message())))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Errors when a value has no TOML form: integers above `i64::MAX` or
    /// paths that are not UTF-8. Config file values always pass.
    pub fn validate(&self) -> Result<(), CliError> {
        toml::Table::try_from(self)
            .map(|_| ())
            .map_err(|e| CliError::Config(format!("unsupported setting value: {e}")))
    }

    fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("params serialize to a table")
    }

    /// `self` with every field set in `flags` replaced by the flag value.
    pub fn overridden_by(&self, flags: &Params) -> Params {
        let mut table = self.to_table();
        table.extend(flags.to_table());
        table.try_into().expect("merged params deserialize")
    }

    /// Names of the fields that are set.
    pub fn keys(&self) -> Vec<String> {
        self.to_table().keys().cloned().collect()
    }

    /// Errors on any set field outside `allowed`.
    pub fn check_keys(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        let extra: Vec<String> = self
            .keys()
            .into_iter()
            .filter(|k| !allowed.contains(&k.as_str()) && !OPERATIONAL_KEYS.contains(&k.as_str()))
            .collect();
        if extra.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!("{command} does not use: {}", extra.join(", "))))
        }
    }

    /// TOML lines for the result-relevant fields, usable as a config file.
    pub fn echo(&self) -> Vec<String> {
        let mut table = self.to_table();
        for k in OPERATIONAL_KEYS {
            table.remove(k);
        }
        toml::to_string(&table).expect("table serializes").lines().map(str::to_owned).collect()
    }

    pub fn require<T: Clone>(field: &Option<T>, name: &str) -> Result<T, CliError> {
        field.clone().ok_or_else(|| CliError::Config(format!("missing required setting `{name}`")))
    }
}
