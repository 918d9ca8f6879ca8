//! One table builder per experiment. Each returns rows in a fixed order
//! regardless of thread scheduling.

use rayon::prelude::*;

use crate::attacks::{linkage_curve, mia_curve, MiaConfig};
use crate::entropy::{empirical_entropy_sensitivity, renyi_sensitivity_bound, shannon_entropy, shannon_sensitivity_bound};
use crate::error::{Error, Result};
use crate::histogram::{build_histogram, BinSpec, Histogram};
use crate::mechanism_f::{pass_rate_experiment, FParams, Universe};
use crate::mechanisms::{release, release_laplace, released_entropy, rng_from_seed, utility_metrics, MechanismKind};
use crate::privacy::PrivacyParams;
use crate::results::ExperimentResult;
use crate::rkhs::{default_clip_bound, private_mean, project_mean, rho_sweep, simulate_chi_square_process, RkhsParams, WienerBasis};
use crate::seed::derive_seed;

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 { (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (m, sd)
}

/// Shannon bound for each `n`, plus one Renyi bound column per order.
pub fn entropy_bound_table(ns: &[u64], alphas: &[f64]) -> Result<Vec<ExperimentResult>> {
    ns.iter()
        .map(|&n| {
            let mut row = ExperimentResult::new("entropy-bound", 0).param("n", n).metric("bound", shannon_sensitivity_bound(n)?);
            for &a in alphas {
                row = row.metric(&format!("renyi_bound_alpha_{a}"), renyi_sensitivity_bound(n, a)?);
            }
            Ok(row)
        })
        .collect()
}

/// Observed entropy change over adjacent moves against the bound, per
/// `(n, m)` cell.
pub fn empirical_dh_table(ns: &[u64], ms: &[usize], trials: usize, master_seed: u64) -> Result<Vec<ExperimentResult>> {
    let cells: Vec<(u64, usize)> = ns.iter().flat_map(|&n| ms.iter().map(move |&m| (n, m))).collect();
    cells
        .par_iter()
        .map(|&(n, m)| {
            let seed = derive_seed(master_seed, "empirical-dh", &format!("n={n},m={m}"));
            let est = empirical_entropy_sensitivity(n, m, trials, &mut rng_from_seed(seed))?;
            let bound = shannon_sensitivity_bound(n)?;
            Ok(ExperimentResult::new("empirical-dh", seed)
                .param("n", n)
                .param("m", m)
                .param("trials", trials)
                .metric("dh_mean", est.mean)
                .metric("dh_max", est.max)
                .metric("bound", bound)
                .metric("max_over_bound", est.max / bound)
                .metric("pairs", est.pairs as f64))
        })
        .collect()
}

/// Mean utility of every mechanism at every epsilon over `trials` releases.
///
/// Trial `i` of a mechanism uses the same seed at every epsilon, so the noise
/// at different budgets comes from the same uniforms scaled differently.
pub fn baselines_table(
    hist: &Histogram,
    epsilons: &[f64],
    delta: f64,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<ExperimentResult>> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let bound = shannon_sensitivity_bound(hist.total().max(1))?;
    let cells: Vec<(MechanismKind, f64)> =
        MechanismKind::ALL.iter().flat_map(|&k| epsilons.iter().map(move |&e| (k, e))).collect();
    cells
        .par_iter()
        .map(|&(kind, eps)| {
            let params = PrivacyParams::new(eps, if kind.needs_delta() { delta } else { 0.0 })?;
            let seed = derive_seed(master_seed, "baselines", &format!("mechanism={kind}"));
            let mut errors = Vec::with_capacity(trials);
            let mut maes = Vec::with_capacity(trials);
            for i in 0..trials {
                let r = release(hist, kind, params, derive_seed(seed, "trial", &i.to_string()))?;
                let u = utility_metrics(hist, &r.released)?;
                errors.push(u.entropy_error);
                maes.push(u.count_mae);
            }
            let (e_mean, e_sd) = mean_sd(&errors);
            let (mae_mean, _) = mean_sd(&maes);
            Ok(ExperimentResult::new("baselines", seed)
                .param("mechanism", kind)
                .param("epsilon", eps)
                .param("delta", params.delta)
                .param("n", hist.total())
                .param("bins", hist.bins())
                .param("trials", trials)
                .metric("entropy_error_mean", e_mean)
                .metric("entropy_error_sd", e_sd)
                .metric("count_mae_mean", mae_mean)
                .metric("bound", bound))
        })
        .collect()
}

/// How the bin edges of a histogram are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binning {
    /// Equal width over `[min, max]` of the data.
    DataRange,
    /// Equal width over a fixed interval.
    Fixed { lo: f64, hi: f64 },
}

impl Binning {
    pub fn spec(&self, values: &[f64], m: usize) -> Result<BinSpec> {
        match *self {
            Binning::DataRange => BinSpec::from_data(values, m),
            Binning::Fixed { lo, hi } => BinSpec::new(lo, hi, m),
        }
    }
}

/// Laplace entropy error as the number of bins varies, at fixed epsilon.
pub fn ablation_bins_table(
    values: &[f64],
    binning: Binning,
    bins: &[usize],
    epsilon: f64,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<ExperimentResult>> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let bound = shannon_sensitivity_bound(values.len() as u64)?;
    bins.par_iter()
        .map(|&m| {
            let hist = build_histogram(values, binning.spec(values, m)?)?;
            let seed = derive_seed(master_seed, "ablation-bins", &format!("bins={m},eps={epsilon}"));
            let errors = (0..trials)
                .map(|i| {
                    let r = release_laplace(&hist, epsilon, derive_seed(seed, "trial", &i.to_string()))?;
                    Ok(utility_metrics(&hist, &r.released)?.entropy_error)
                })
                .collect::<Result<Vec<f64>>>()?;
            let (mean, sd) = mean_sd(&errors);
            Ok(ExperimentResult::new("ablation-bins", seed)
                .param("bins", m)
                .param("epsilon", epsilon)
                .param("n", values.len())
                .param("trials", trials)
                .metric("h_orig", shannon_entropy(&hist)?)
                .metric("entropy_error_mean", mean)
                .metric("entropy_error_sd", sd)
                .metric("bound", bound))
        })
        .collect()
}

/// Pass rate over a `(k, gamma)` grid on records from a line universe of
/// `universe_len` points.
pub fn pass_rate_table(
    records: &[usize],
    universe_len: usize,
    base: &FParams,
    ks: &[u64],
    gammas: &[f64],
    attempts: u64,
    master_seed: u64,
) -> Result<Vec<ExperimentResult>> {
    let universe = Universe::line(universe_len)?;
    pass_rate_experiment(records, &universe, base, ks, gammas, attempts, master_seed)
}

/// Membership-inference accuracy and AUC per epsilon.
pub fn mia_table(base: &Histogram, target: f64, epsilons: &[f64], cfg: &MiaConfig, master_seed: u64) -> Result<Vec<ExperimentResult>> {
    Ok(mia_curve(base, target, epsilons, cfg, master_seed)?
        .into_iter()
        .map(|(rep, seed)| rep.to_result(seed).param("worlds", cfg.worlds))
        .collect())
}

/// `D'` for the linkage game: one record moved out of the fullest bin into its
/// right neighbour (left neighbour for the last bin).
pub fn linkage_neighbour(d: &Histogram) -> Result<Histogram> {
    if d.bins() < 2 {
        return Err(Error::param("linkage needs at least 2 bins"));
    }
    let from = (0..d.bins()).max_by_key(|&i| (d.counts()[i], std::cmp::Reverse(i))).unwrap_or(0);
    let to = if from + 1 < d.bins() { from + 1 } else { from - 1 };
    d.moved(from, to).ok_or(Error::EmptyHistogram)
}

pub fn linkage_table(d: &Histogram, epsilons: &[f64], trials: usize, master_seed: u64) -> Result<Vec<ExperimentResult>> {
    linkage_curve(d, &linkage_neighbour(d)?, epsilons, trials, master_seed)
}

/// Shape of the path ensemble and the private-mean sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkhsSetup {
    pub paths: usize,
    pub steps: usize,
    pub privacy: PrivacyParams,
    pub trials: usize,
}

pub fn rkhs_table(setup: &RkhsSetup, rhos: &[f64], master_seed: u64) -> Result<Vec<ExperimentResult>> {
    Ok(rkhs_outputs(setup, rhos, master_seed)?.0)
}

/// Sweep rows plus example paths on the grid: the empirical mean, its
/// projection, and one private mean per penalty.
pub fn rkhs_outputs(setup: &RkhsSetup, rhos: &[f64], master_seed: u64) -> Result<(Vec<ExperimentResult>, PathTable)> {
    let ens_seed = derive_seed(master_seed, "rkhs-ensemble", &format!("paths={},steps={}", setup.paths, setup.steps));
    let ensemble = simulate_chi_square_process(setup.paths, setup.steps, &mut rng_from_seed(ens_seed))?;
    let basis = WienerBasis::new(WienerBasis::default_order(setup.steps), ensemble.grid())?;
    let clip = default_clip_bound(&ensemble);
    let rows = rho_sweep(&ensemble, &basis, rhos, setup.privacy, clip, setup.trials, master_seed)?;

    let mut paths = vec![
        ("mean".to_string(), ensemble.mean_path()),
        ("projected".to_string(), basis.reconstruct(&project_mean(&ensemble, &basis)?)),
    ];
    for &rho in rhos {
        let p = RkhsParams::new(rho, setup.privacy, clip)?;
        let mut rng = rng_from_seed(derive_seed(master_seed, "rkhs-example", &format!("rho={rho}")));
        paths.push((format!("private_rho={rho}"), private_mean(&ensemble, &p, &basis, &mut rng)?.path));
    }
    Ok((rows, PathTable { grid: ensemble.grid().to_vec(), paths }))
}

/// Labelled paths sharing one time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTable {
    pub grid: Vec<f64>,
    pub paths: Vec<(String, Vec<f64>)>,
}

/// Original entropy and one Laplace release per `(bins, epsilon)` on a loaded
/// column, in the layout `dataset, n, bins, epsilon, h_orig, h_noisy, ...`.
pub fn csv_entropy_rows(
    experiment: &str,
    dataset: &str,
    values: &[f64],
    bins: &[usize],
    epsilons: &[f64],
    master_seed: u64,
) -> Result<Vec<ExperimentResult>> {
    let n = values.len() as u64;
    let bound = shannon_sensitivity_bound(n)?;
    let mut rows = Vec::new();
    for &m in bins {
        let spec = BinSpec::from_data(values, m)?;
        let hist = build_histogram(values, spec)?;
        let h_orig = shannon_entropy(&hist)?;
        for &eps in epsilons {
            let seed = derive_seed(master_seed, experiment, &format!("dataset={dataset},bins={m},eps={eps}"));
            let r = release_laplace(&hist, eps, seed)?;
            let h_noisy = released_entropy(&r.released);
            rows.push(
                ExperimentResult::new(experiment, seed)
                    .param("dataset", dataset)
                    .param("n", n)
                    .param("bins", m)
                    .param("epsilon", eps)
                    .metric("h_orig", h_orig)
                    .metric("h_noisy", h_noisy)
                    .metric("bound", bound)
                    .metric("entropy_error", (h_orig - h_noisy).abs())
                    .metric("lo", spec.lo())
                    .metric("hi", spec.hi()),
            );
        }
    }
    Ok(rows)
}
