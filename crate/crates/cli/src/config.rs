//! Run configuration: flags, optionally layered over a TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StackChoice {
    Uniform,
    Adaptive,
}

/// Every parameter a subcommand may read. Keys in the config file use the
/// same names with underscores; a flag given on the command line wins.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Row height parameter α of the target.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Target threshold δ₁ = 1/√(1+2α²), an alternative to --alpha.
    #[arg(long, conflicts_with = "alpha")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stack: Option<StackChoice>,
    /// Truncation tolerance of infinite products.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Covering radius relative to the largest row threshold.
    #[arg(long, conflicts_with = "epsilon", allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_offset: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_list: Option<Vec<f64>>,
    /// Check a single row's strip instead of the whole stack.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_re: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_im: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_im: Option<bool>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_range: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im_range: Option<Vec<f64>>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,

    /// Build a sparse witness product with |f| ≥ delta on the zeros.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// Zeros taken on each side of the axis in every row.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeros_per_side: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corona_c: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_list: Option<Vec<usize>>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Euclidean circle data for figure1.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circles: Option<PathBuf>,
    /// Zero-set cache: written by construct, read by the other commands.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,

    /// Worker threads; output does not depend on it.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

fn to_table(c: &RunConfig) -> toml::Table {
    toml::Table::try_from(c).expect("config serialises")
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// `self` with every unset key taken from `file`.
    pub fn over(self, file: RunConfig) -> Result<Self, CliError> {
        let threads = self.threads.or(file.threads);
        let mut merged = to_table(&file);
        merged.extend(to_table(&self));
        let mut out: RunConfig = merged.try_into().map_err(|e| CliError::Usage(format!("config: {e}")))?;
        out.threads = threads;
        if out.alpha.is_some() && out.delta1.is_some() {
            return Err(CliError::Usage("alpha and delta1 are mutually exclusive".into()));
        }
        if out.epsilon.is_some() && out.epsilon_offset.is_some() {
            return Err(CliError::Usage(
                "epsilon and epsilon_offset are mutually exclusive".into(),
            ));
        }
        Ok(out)
    }

    /// `key = value` lines of every set key, in declaration order.
    pub fn echo(&self) -> Vec<String> {
        let text = toml::to_string(self).expect("config serialises");
        text.lines().filter(|l| !l.is_empty()).map(str::to_owned).collect()
    }
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{name} must be positive and finite, got {x}")))
    }
}

pub fn check_ranges(c: &RunConfig) -> Result<(), CliError> {
    for (name, v) in [
        ("alpha", c.alpha),
        ("rho", c.rho),
        ("tol", c.tol),
        ("corona_c", c.corona_c),
        ("y_min", c.y_min),
        ("y_max", c.y_max),
    ] {
        if let Some(x) = v {
            positive(name, x)?;
        }
    }
    if let Some(d) = c.delta1
        && !(d > 0.0 && d < 1.0)
    {
        return Err(CliError::Usage(format!("delta1 must lie in (0, 1), got {d}")));
    }
    if let Some(e) = c.epsilon
        && !(e > 0.0 && e < 1.0)
    {
        return Err(CliError::Usage(format!("epsilon must lie in (0, 1), got {e}")));
    }
    for (name, v) in [("levels", c.levels), ("n_points", c.n_points), ("r", c.r)] {
        if v == Some(0) {
            return Err(CliError::Usage(format!("{name} must be at least 1")));
        }
    }
    for (name, v) in [("n_re", c.n_re), ("n_im", c.n_im)] {
        if let Some(n) = v
            && n < 2
        {
            return Err(CliError::Usage(format!("{name} must be at least 2, got {n}")));
        }
    }
    for (name, v) in [("re_range", &c.re_range), ("im_range", &c.im_range)] {
        if let Some(r) = v
            && (r.len() != 2 || !(r[0] <= r[1]))
        {
            return Err(CliError::Usage(format!("{name} needs two ordered values lo,hi")));
        }
    }
    if let Some(t) = c.threads
        && t == 0
    {
        return Err(CliError::Usage("threads must be at least 1".into()));
    }
    Ok(())
}
