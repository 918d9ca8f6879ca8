use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::data::DatasetSource;
use crate::error::{Error, Result};

/// Every knob of every subcommand. Fields left unset fall back to the
/// subcommand's defaults; the JSON config file uses the same field names as
/// the command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// CSV file holding the input column.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Column name in the CSV file.
    #[arg(long)]
    pub column: Option<String>,
    /// Read only the first N data rows.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Histogram bin counts (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub bins: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub epsilon: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Master seed; every random stream derives from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output root; results land in `<out>/<subcommand>/`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<u64>>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gamma: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps0: Option<f64>,
    /// Proposal temperature for mechanism F.
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub rho: Option<Vec<f64>>,
    /// Renyi orders reported next to the Shannon bound.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Option<Vec<f64>>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Dataset sizes for the bound and sensitivity sweeps.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    /// Single attempts per pass-rate cell.
    #[arg(long)]
    pub attempts: Option<u64>,
    /// Simulated worlds per membership-inference repeat.
    #[arg(long)]
    pub worlds: Option<usize>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Target record value for membership inference.
    #[arg(long, allow_negative_numbers = true)]
    pub target: Option<f64>,
    /// Sources for `multi-dataset`; config file only.
    #[arg(skip)]
    pub datasets: Option<Vec<DatasetSource>>,
}

pub const DEFAULT_SEED: u64 = 42;

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("cannot read config {}: {e}", path.display())]))?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
        // relative input paths are taken from the config file's directory
        if let Some(dir) = path.parent() {
            let resolve = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            };
            if let Some(d) = cfg.data.as_mut() {
                resolve(d);
            }
            for src in cfg.datasets.iter_mut().flatten() {
                resolve(&mut src.path);
            }
        }
        Ok(cfg)
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overridden_by(mut self, flags: &ExperimentConfig) -> Self {
        overlay!(
            self, flags, data, column, cap, bins, epsilon, delta, seed, out, k, t, gamma, eps0, tau, rho, alpha,
            repeats, trials, n, attempts, worlds, paths, steps, target, datasets
        );
        self
    }

    pub fn master_seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("results"))
    }

    /// The configured input column, if `data` is set.
    pub fn source(&self) -> Option<DatasetSource> {
        self.data.as_ref().map(|p| DatasetSource {
            name: None,
            path: p.clone(),
            column: self.column.clone().unwrap_or_default(),
            cap: self.cap,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: ExperimentConfig =
            serde_json::from_str(r#"{"seed": 7, "epsilon": [0.5, 1.0], "bins": [30], "trials": 10}"#).unwrap();
        let flags = ExperimentConfig { seed: Some(9), trials: None, bins: Some(vec![10, 20]), ..Default::default() };
        let merged = file.overridden_by(&flags);
        assert_eq!(merged.master_seed(), 9);
        assert_eq!(merged.epsilon, Some(vec![0.5, 1.0]));
        assert_eq!(merged.bins, Some(vec![10, 20]));
        assert_eq!(merged.trials, Some(10));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"epsilonn": [1.0]}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig {
            datasets: Some(vec![DatasetSource::new("a.csv", "y").with_cap(10)]),
            gamma: Some(vec![2.0]),
            ..Default::default()
        };
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
    }
}
