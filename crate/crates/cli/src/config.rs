use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Every experiment setting. Flags and config keys share these names; values
/// read from `--config` replace the ones given as flags.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// TOML file whose keys override the flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Command name; only allowed in a config file, where it must match
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    /// Potential: `gauss` (with --s) or `bernoulli:p1,p2,...`
    #[arg(long)]
    pub potential: Option<String>,
    /// Exponent s of the Gauss potential
    #[arg(long)]
    pub s: Option<f64>,
    /// Measure μ (or ℓ): `bernoulli:..`, `markov:r1;r2;..`, `periodic:w`, `gauss`, `inverse-square`
    #[arg(long)]
    pub mu: Option<String>,
    /// Reference measure ν, same syntax as --mu
    #[arg(long)]
    pub nu: Option<String>,

    /// Alphabet cap N
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub cap: Option<u32>,
    /// Block depth d of the Gibbs model
    #[arg(long = "d")]
    #[serde(rename = "d")]
    pub depth: Option<usize>,
    /// Word length k
    #[arg(long)]
    pub k: Option<usize>,
    /// Cap of the entropy sums
    #[arg(long)]
    pub entropy_cap: Option<u32>,
    /// Rank for the convergence-exponent fit
    #[arg(long)]
    pub rank: Option<usize>,
    /// Horizons (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<usize>>,
    /// Stream length (digits emitted or scanned)
    #[arg(long)]
    pub length: Option<usize>,

    /// Digit caps a_n: `none`, `n`, `log2`, `pow:<p>`
    #[arg(long)]
    pub caps: Option<String>,
    /// Seed levels J
    #[arg(long)]
    pub levels: Option<usize>,
    /// Cantor construction: `ystar` or `f`
    #[arg(long)]
    pub kind: Option<String>,
    /// Number of samples
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Rank table size for F_z
    #[arg(long)]
    pub ranks: Option<usize>,
    /// Eigen-solver tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Input digit stream (as written by `seed`)
    #[arg(long)]
    pub stream: Option<PathBuf>,

    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads
    #[arg(long, env = "GENPOINT_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV file for trajectories and tables
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl Params {
    /// Applies the config file named by `--config`, if any.
    pub fn resolve(self, command: &str) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = load(&path)?;
        if let Some(c) = &file.command {
            if c != command {
                return Err(CliError::Config(format!(
                    "{}: command = {c:?} but running {command:?}",
                    path.display()
                )));
            }
        }
        let mut base = serde_json::to_value(&self).map_err(|e| CliError::Config(e.to_string()))?;
        let over = serde_json::to_value(&file).map_err(|e| CliError::Config(e.to_string()))?;
        if let (Some(b), Some(o)) = (base.as_object_mut(), over.as_object()) {
            for (k, v) in o {
                if !v.is_null() {
                    b.insert(k.clone(), v.clone());
                }
            }
        }
        let mut merged: Params = serde_json::from_value(base).map_err(|e| CliError::Config(e.to_string()))?;
        merged.config = self.config;
        merged.command = None;
        Ok(merged)
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(1).max(1)
    }

    /// The settings echoed into every report, as `# key = value` lines.
    pub fn echo(&self) -> String {
        // output paths, format and worker count do not change the results
        let shown = Params { workers: None, format: None, out: None, csv: None, ..self.clone() };
        let body = toml::to_string(&shown).unwrap_or_default();
        body.lines().map(|l| format!("# {l}\n")).collect()
    }
}

fn load(path: &Path) -> Result<Params, CliError> {
    let diag = |e: &dyn std::fmt::Display| CliError::Config(format!("{}: {e}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| diag(&e))?;
    toml::from_str(&text).map_err(|e| diag(&e))
}
