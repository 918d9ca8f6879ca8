//! Seeded experiment runner. Each [`Subcommand`] writes
//! `<out>/<subcommand>/results.csv`, a `results.json` sidecar holding the same
//! rows, and `summary.json` with the config echo, seeds and timing.

pub mod config;
pub mod data;
pub mod sweeps;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use indexmap::IndexMap;
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use config::{ExperimentConfig, DEFAULT_SEED};
pub use data::{load_column, DatasetSource};

use crate::attacks::MiaConfig;
use crate::error::{Error, Result};
use crate::histogram::{build_histogram, BinSpec};
use crate::mechanism_f::FParams;
use crate::privacy::PrivacyParams;
use crate::results::{write_csv, write_json, ExperimentResult, TableSchema};
use crate::seed::{derive_seed, sha256_hex};
use sweeps::Binning;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    EntropyBound,
    EmpiricalDh,
    Baselines,
    AblationBins,
    PassRate,
    Mia,
    Linkage,
    Rkhs,
    CsvEntropy,
    MultiDataset,
}

impl Subcommand {
    pub const ALL: [Subcommand; 10] = [
        Subcommand::EntropyBound,
        Subcommand::EmpiricalDh,
        Subcommand::Baselines,
        Subcommand::AblationBins,
        Subcommand::PassRate,
        Subcommand::Mia,
        Subcommand::Linkage,
        Subcommand::Rkhs,
        Subcommand::CsvEntropy,
        Subcommand::MultiDataset,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::EntropyBound => "entropy-bound",
            Subcommand::EmpiricalDh => "empirical-dh",
            Subcommand::Baselines => "baselines",
            Subcommand::AblationBins => "ablation-bins",
            Subcommand::PassRate => "pass-rate",
            Subcommand::Mia => "mia",
            Subcommand::Linkage => "linkage",
            Subcommand::Rkhs => "rkhs",
            Subcommand::CsvEntropy => "csv-entropy",
            Subcommand::MultiDataset => "multi-dataset",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(vec![format!("unknown subcommand {s:?}")]))
    }
}

/// Default grids. Fixture sizes apply only when no `--data` is given.
pub mod defaults {
    pub const BOUND_N: [u64; 7] = [50, 100, 200, 500, 1000, 2000, 5000];
    pub const DH_BINS: [usize; 3] = [10, 30, 100];
    pub const DH_TRIALS: usize = 200;
    pub const EPSILONS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
    pub const DELTA: f64 = 1e-5;
    pub const BASELINE_TRIALS: usize = 50;
    /// About ten records per bin: the added noise is then comparable to the
    /// resampling error of the synthetic baselines, so their epsilon trend is
    /// visible. With many records per bin resampling dominates and all
    /// epsilons look alike for those two mechanisms.
    pub const BASELINE_N: usize = 1000;
    pub const BASELINE_BINS: usize = 100;
    pub const BINS: usize = 30;
    pub const ABLATION_BINS: [usize; 6] = [5, 10, 20, 30, 50, 100];
    pub const FIXTURE_N: usize = 10_000;
    pub const PASS_K: [u64; 4] = [10, 20, 30, 50];
    pub const PASS_T: u64 = 2;
    /// Each `ln gamma` doubles the previous one, so the partitions nest.
    pub const PASS_GAMMA: [f64; 5] = [1.189_207_115_002_721, std::f64::consts::SQRT_2, 2.0, 4.0, 16.0];
    pub const PASS_EPS0: f64 = 0.1;
    pub const PASS_TAU: f64 = 3.0;
    pub const PASS_ATTEMPTS: u64 = 10_000;
    pub const PASS_RECORDS: usize = 200;
    pub const MIA_EPSILONS: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 2.0, 4.0];
    pub const MIA_BASE_N: usize = 200;
    pub const LINKAGE_EPSILONS: [f64; 6] = [0.001, 0.01, 0.1, 1.0, 10.0, 1e9];
    pub const LINKAGE_TRIALS: usize = 2000;
    pub const LINKAGE_N: usize = 1000;
    pub const RHOS: [f64; 3] = [1e-6, 1e-3, 0.1];
    pub const PATHS: usize = 50;
    pub const STEPS: usize = 80;
    pub const RKHS_EPSILON: f64 = 1.0;
    pub const RKHS_TRIALS: usize = 20;
    pub const CSV_EPSILON: f64 = 1.0;
}

/// Every config violation relevant to `sub`, collected before any work.
pub fn validate(sub: Subcommand, c: &ExperimentConfig) -> Vec<String> {
    let mut v = Vec::new();
    let mut positive = |name: &str, xs: &[f64]| {
        for &x in xs {
            if !(x > 0.0 && x.is_finite()) {
                v.push(format!("{name} must be positive and finite (got {x})"));
            }
        }
    };
    if let Some(e) = &c.epsilon {
        positive("epsilon", e);
    }
    if let Some(x) = c.eps0 {
        positive("eps0", &[x]);
    }
    if let Some(x) = c.tau {
        positive("tau", &[x]);
    }
    if let Some(r) = &c.rho {
        positive("rho", r);
    }
    if let Some(d) = c.delta {
        if !(d > 0.0 && d < 1.0) {
            v.push(format!("delta must lie in (0, 1) (got {d})"));
        }
    }
    if let Some(e) = &c.epsilon {
        if e.is_empty() {
            v.push("epsilon list is empty".into());
        }
    }
    if let Some(b) = &c.bins {
        if b.is_empty() {
            v.push("bins list is empty".into());
        }
        let min = if sub == Subcommand::EmpiricalDh || sub == Subcommand::Linkage { 2 } else { 1 };
        for &m in b {
            if m < min {
                v.push(format!("bins must be at least {min} (got {m})"));
            }
        }
    }
    if c.cap == Some(0) {
        v.push("cap must be at least 1".into());
    }
    if let Some(ns) = &c.n {
        if ns.iter().any(|&n| n == 0) {
            v.push("n must be positive".into());
        }
    }
    for (name, val) in [("trials", c.trials), ("repeats", c.repeats)] {
        if val == Some(0) {
            v.push(format!("{name} must be positive"));
        }
    }
    if c.attempts == Some(0) {
        v.push("attempts must be positive".into());
    }
    if let Some(w) = c.worlds {
        if w < 2 || w % 2 != 0 {
            v.push(format!("worlds must be even and at least 2 (got {w})"));
        }
    }
    if let Some(a) = &c.alpha {
        for &x in a {
            if !(x > 0.0 && x.is_finite()) || x == 1.0 {
                v.push(format!("alpha must be positive and not 1 (got {x})"));
            }
        }
    }
    if let Some(g) = &c.gamma {
        for &x in g {
            if !(x > 1.0 && x.is_finite()) {
                v.push(format!("gamma must exceed 1 (got {x})"));
            }
        }
    }
    if c.t == Some(0) {
        v.push("t must be at least 1".into());
    }
    if let Some(ks) = &c.k {
        let t = c.t.unwrap_or(defaults::PASS_T);
        for &k in ks {
            if k < t {
                v.push(format!("k must be at least t (k = {k}, t = {t})"));
            }
        }
    }
    if c.paths.is_some_and(|p| p < 2) {
        v.push("paths must be at least 2".into());
    }
    if c.steps.is_some_and(|s| s < 3) {
        v.push("steps must be at least 3".into());
    }
    if let Some(t) = c.target {
        if !t.is_finite() {
            v.push("target must be finite".into());
        }
    }
    if c.data.is_some() && c.column.is_none() {
        v.push("--column is required with --data".into());
    }
    match sub {
        Subcommand::CsvEntropy if c.data.is_none() => v.push("csv-entropy needs --data and --column".into()),
        Subcommand::MultiDataset => match &c.datasets {
            None => v.push("multi-dataset needs a `datasets` list in the config file".into()),
            Some(ds) if ds.is_empty() => v.push("datasets list is empty".into()),
            Some(ds) => {
                for d in ds {
                    if d.cap == Some(0) {
                        v.push(format!("cap for {} must be at least 1", d.path.display()));
                    }
                }
            }
        },
        _ => {}
    }
    v
}

/// What a run wrote and how it was produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub subcommand: Subcommand,
    pub library_version: String,
    pub master_seed: u64,
    pub derived_seeds: Vec<u64>,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub columns: TableSchema,
    pub rows: usize,
    pub metadata: IndexMap<String, serde_json::Value>,
    pub wall_time_secs: f64,
    pub results_csv: PathBuf,
}

/// Rows plus run metadata, before anything is written.
pub struct Table {
    pub rows: Vec<ExperimentResult>,
    pub metadata: IndexMap<String, serde_json::Value>,
    /// Written to `means.csv` when present.
    pub paths: Option<sweeps::PathTable>,
}

fn list<T: Copy>(v: &Option<Vec<T>>, default: &[T]) -> Vec<T> {
    v.clone().unwrap_or_else(|| default.to_vec())
}

fn first<T: Copy>(v: &Option<Vec<T>>, default: T) -> T {
    v.as_ref().and_then(|x| x.first().copied()).unwrap_or(default)
}

/// Values of the configured column, or the seeded uniform fixture of `n`
/// records together with the binning it should use.
fn values_or_fixture(c: &ExperimentConfig, label: &str, n: usize, meta: &mut IndexMap<String, serde_json::Value>) -> Result<(Vec<f64>, Binning)> {
    match c.source() {
        Some(src) => {
            let v = load_column(&src)?;
            meta.insert("data".into(), json!({ "path": src.path, "column": src.column, "cap": src.cap, "n": v.len() }));
            meta.insert("binning".into(), json!("equal width over [min, max] of the column"));
            Ok((v, Binning::DataRange))
        }
        None => {
            let seed = derive_seed(c.master_seed(), label, &format!("fixture,n={n}"));
            meta.insert("data".into(), json!({ "fixture": "uniform on [0, 1)", "n": n, "seed": seed }));
            meta.insert("binning".into(), json!("equal width over [0, 1]"));
            Ok((data::uniform_fixture(n, seed), Binning::Fixed { lo: 0.0, hi: 1.0 }))
        }
    }
}

/// Computes the table for `sub` without touching the filesystem (beyond
/// reading inputs).
pub fn compute(sub: Subcommand, c: &ExperimentConfig) -> Result<Table> {
    let errs = validate(sub, c);
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let seed = c.master_seed();
    let mut meta = IndexMap::new();
    let mut paths = None;
    let delta = c.delta.unwrap_or(defaults::DELTA);
    let rows = match sub {
        Subcommand::EntropyBound => sweeps::entropy_bound_table(&list(&c.n, &defaults::BOUND_N), &list(&c.alpha, &[]))?,
        Subcommand::EmpiricalDh => sweeps::empirical_dh_table(
            &list(&c.n, &defaults::BOUND_N),
            &list(&c.bins, &defaults::DH_BINS),
            c.trials.unwrap_or(defaults::DH_TRIALS),
            seed,
        )?,
        Subcommand::Baselines => {
            let (values, binning) = values_or_fixture(c, "baselines", defaults::BASELINE_N, &mut meta)?;
            let m = first(&c.bins, if c.data.is_some() { defaults::BINS } else { defaults::BASELINE_BINS });
            let hist = build_histogram(&values, binning.spec(&values, m)?)?;
            sweeps::baselines_table(
                &hist,
                &list(&c.epsilon, &defaults::EPSILONS),
                delta,
                c.trials.unwrap_or(defaults::BASELINE_TRIALS),
                seed,
            )?
        }
        Subcommand::AblationBins => {
            let (values, binning) = values_or_fixture(c, "ablation-bins", defaults::FIXTURE_N, &mut meta)?;
            sweeps::ablation_bins_table(
                &values,
                binning,
                &list(&c.bins, &defaults::ABLATION_BINS),
                first(&c.epsilon, 1.0),
                c.trials.unwrap_or(defaults::BASELINE_TRIALS),
                seed,
            )?
        }
        Subcommand::PassRate => {
            let len = first(&c.bins, defaults::BINS);
            let records = match c.source() {
                Some(src) => {
                    let v = load_column(&src)?;
                    let spec = BinSpec::from_data(&v, len)?;
                    meta.insert("data".into(), json!({ "path": src.path, "column": src.column, "n": v.len() }));
                    v.iter().map(|&x| spec.index_of(x)).collect()
                }
                None => {
                    let s = derive_seed(seed, "pass-rate", "records");
                    meta.insert("data".into(), json!({ "fixture": "rounded normal on a line", "n": defaults::PASS_RECORDS, "seed": s }));
                    data::clustered_records(defaults::PASS_RECORDS, len, s)
                }
            };
            meta.insert("universe".into(), json!({ "kind": "line", "len": len }));
            let base = FParams::new(10, c.t.unwrap_or(defaults::PASS_T), 2.0, c.eps0.unwrap_or(defaults::PASS_EPS0))
                .with_tau(c.tau.unwrap_or(defaults::PASS_TAU));
            sweeps::pass_rate_table(
                &records,
                len,
                &base,
                &list(&c.k, &defaults::PASS_K),
                &list(&c.gamma, &defaults::PASS_GAMMA),
                c.attempts.unwrap_or(defaults::PASS_ATTEMPTS),
                seed,
            )?
        }
        Subcommand::Mia => {
            let (values, binning) = values_or_fixture(c, "mia", defaults::MIA_BASE_N, &mut meta)?;
            let spec = binning.spec(&values, first(&c.bins, defaults::BINS))?;
            let base = build_histogram(&values, spec)?;
            let target = c.target.unwrap_or((spec.lo() + spec.hi()) / 2.0);
            meta.insert("target".into(), json!(target));
            let cfg = MiaConfig {
                repeats: c.repeats.unwrap_or(MiaConfig::default().repeats),
                worlds: c.worlds.unwrap_or(MiaConfig::default().worlds),
                ..MiaConfig::default()
            };
            meta.insert("classifier".into(), json!(cfg));
            sweeps::mia_table(&base, target, &list(&c.epsilon, &defaults::MIA_EPSILONS), &cfg, seed)?
        }
        Subcommand::Linkage => {
            let (values, binning) = values_or_fixture(c, "linkage", defaults::LINKAGE_N, &mut meta)?;
            let d = build_histogram(&values, binning.spec(&values, first(&c.bins, defaults::BINS))?)?;
            sweeps::linkage_table(
                &d,
                &list(&c.epsilon, &defaults::LINKAGE_EPSILONS),
                c.trials.unwrap_or(defaults::LINKAGE_TRIALS),
                seed,
            )?
        }
        Subcommand::Rkhs => {
            let setup = sweeps::RkhsSetup {
                paths: c.paths.unwrap_or(defaults::PATHS),
                steps: c.steps.unwrap_or(defaults::STEPS),
                privacy: PrivacyParams::new(first(&c.epsilon, defaults::RKHS_EPSILON), delta)?,
                trials: c.trials.unwrap_or(defaults::RKHS_TRIALS),
            };
            meta.insert("basis_order".into(), json!(crate::rkhs::WienerBasis::default_order(setup.steps)));
            let (rows, means) = sweeps::rkhs_outputs(&setup, &list(&c.rho, &defaults::RHOS), seed)?;
            paths = Some(means);
            rows
        }
        Subcommand::CsvEntropy => {
            let src = c.source().expect("validated");
            let values = load_column(&src)?;
            meta.insert("data".into(), json!({ "path": src.path, "column": src.column, "cap": src.cap, "n": values.len() }));
            meta.insert("binning".into(), json!("equal width over [min, max] of the column"));
            sweeps::csv_entropy_rows(
                "csv-entropy",
                &src.label(),
                &values,
                &list(&c.bins, &[defaults::BINS]),
                &list(&c.epsilon, &[defaults::CSV_EPSILON]),
                seed,
            )?
        }
        Subcommand::MultiDataset => {
            let m = first(&c.bins, defaults::BINS);
            let eps = first(&c.epsilon, defaults::CSV_EPSILON);
            meta.insert("binning".into(), json!("equal width over [min, max] of each column"));
            let mut rows = Vec::new();
            for src in c.datasets.as_deref().unwrap_or_default() {
                let values = load_column(src)?;
                rows.extend(sweeps::csv_entropy_rows("multi-dataset", &src.label(), &values, &[m], &[eps], seed)?);
            }
            rows
        }
    };
    Ok(Table { rows, metadata: meta, paths })
}

/// Runs `sub` and writes its three output files under `<out>/<sub>/`.
pub fn run(sub: Subcommand, c: &ExperimentConfig) -> Result<RunSummary> {
    let started = Instant::now();
    let table = compute(sub, c)?;
    let dir = c.out_dir().join(sub.name());
    std::fs::create_dir_all(&dir)?;
    let results_csv = dir.join("results.csv");
    let columns = write_csv(&results_csv, &table.rows)?;
    write_json(&dir.join("results.json"), &table.rows)?;
    if let Some(p) = &table.paths {
        crate::rkhs::write_paths_csv(&dir.join("means.csv"), &p.grid, &p.paths)?;
    }

    let mut derived_seeds: Vec<u64> = Vec::new();
    for r in &table.rows {
        if !derived_seeds.contains(&r.seed) {
            derived_seeds.push(r.seed);
        }
    }
    let summary = RunSummary {
        subcommand: sub,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: c.master_seed(),
        derived_seeds,
        config: c.clone(),
        config_hash: sha256_hex(serde_json::to_string(c)?.as_bytes()),
        columns,
        rows: table.rows.len(),
        metadata: table.metadata,
        wall_time_secs: started.elapsed().as_secs_f64(),
        results_csv,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    info!("{sub}: {} rows in {:.2}s -> {}", summary.rows, summary.wall_time_secs, dir.display());
    Ok(summary)
}
