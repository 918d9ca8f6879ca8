//! Output-side attacks on released histograms: membership inference from
//! (entropy, total count) features, and the closest-reference linkage attack.
//!
//! The membership game releases the histogram of either `base ∪ {target}`
//! (member) or `base` alone (non-member), so worlds differ by one added record.

mod linkage;
mod logistic;

pub use linkage::{linkage_attack, linkage_curve, LinkageGuess};
pub use logistic::{fit_logistic, LogisticModel};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{build_histogram, BinSpec, Histogram};
use crate::mechanisms::{release_laplace_with, released_entropy, rng_from_seed};
use crate::results::ExperimentResult;
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiaSample {
    /// Shannon entropy of the release in bits.
    pub entropy: f64,
    /// Total released count.
    pub total_count: f64,
    pub member: bool,
}

impl MiaSample {
    pub fn features(&self) -> [f64; 2] {
        [self.entropy, self.total_count]
    }
}

fn sample_from(released: &Histogram, member: bool) -> MiaSample {
    MiaSample { entropy: released_entropy(released), total_count: released.total() as f64, member }
}

/// `worlds` Laplace releases at `epsilon`, alternating member and non-member.
pub fn build_mia_dataset(
    base: &[f64],
    target: f64,
    spec: BinSpec,
    epsilon: f64,
    worlds: usize,
    seed: u64,
) -> Result<Vec<MiaSample>> {
    let non_member = build_histogram(base, spec)?;
    build_mia_dataset_from(&non_member, target, epsilon, worlds, seed)
}

/// Same as [`build_mia_dataset`] with the base histogram already built.
pub fn build_mia_dataset_from(
    non_member: &Histogram,
    target: f64,
    epsilon: f64,
    worlds: usize,
    seed: u64,
) -> Result<Vec<MiaSample>> {
    if worlds < 2 || worlds % 2 != 0 {
        return Err(Error::param(format!("worlds must be even and at least 2, got {worlds}")));
    }
    if !target.is_finite() {
        return Err(Error::NonFinite { indices: vec![0] });
    }
    let mut counts = non_member.counts().to_vec();
    counts[non_member.spec().index_of(target)] += 1;
    let member = Histogram::from_counts(*non_member.spec(), counts)?;

    let mut rng = rng_from_seed(seed);
    (0..worlds)
        .map(|i| {
            let is_member = i % 2 == 0;
            let source = if is_member { &member } else { non_member };
            let (_, released) = release_laplace_with(source, epsilon, &mut rng)?;
            Ok(sample_from(&released, is_member))
        })
        .collect()
}

/// Area under the ROC curve via the Mann-Whitney statistic; tied scores count
/// one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::param("scores and labels differ in length"));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::param("scores must not be NaN"));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::param("AUC needs both classes present"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // average ranks over tie groups
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum_pos += order[i..=j].iter().filter(|&&k| labels[k]).count() as f64 * avg_rank;
        i = j + 1;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

/// Membership-inference summary at one epsilon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub epsilon: f64,
    pub accuracy_mean: f64,
    pub accuracy_ci95: (f64, f64),
    pub auc_mean: f64,
    pub auc_ci95: (f64, f64),
    pub repeats: usize,
}

impl AttackReport {
    /// Row with columns `epsilon, acc_mean, acc_lo, acc_hi, auc_mean, auc_lo,
    /// auc_hi`.
    pub fn to_result(&self, seed: u64) -> ExperimentResult {
        ExperimentResult::new("mia", seed)
            .param("epsilon", self.epsilon)
            .metric("acc_mean", self.accuracy_mean)
            .metric("acc_lo", self.accuracy_ci95.0)
            .metric("acc_hi", self.accuracy_ci95.1)
            .metric("auc_mean", self.auc_mean)
            .metric("auc_lo", self.auc_ci95.0)
            .metric("auc_hi", self.auc_ci95.1)
            .metric("repeats", self.repeats as f64)
    }
}

/// Mean with a normal-approximation 95% interval `mean ± 1.96 sd / sqrt(r)`,
/// clamped to `[0, 1]`.
pub fn mean_ci95(values: &[f64]) -> (f64, (f64, f64)) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
    } else {
        0.0
    };
    let half = 1.96 * sd / r.sqrt();
    (mean, ((mean - half).max(0.0), (mean + half).min(1.0)))
}

/// Harness settings for [`mia_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiaConfig {
    pub repeats: usize,
    pub worlds: usize,
    pub train_fraction: f64,
    pub iters: usize,
    pub lr: f64,
}

impl Default for MiaConfig {
    fn default() -> Self {
        Self { repeats: 5, worlds: 400, train_fraction: 0.7, iters: 500, lr: 0.1 }
    }
}

/// Per epsilon: `repeats` independent build / fit / evaluate cycles with a
/// train/test split, reduced to mean accuracy and AUC with 95% intervals.
pub fn mia_curve(
    base: &Histogram,
    target: f64,
    eps_grid: &[f64],
    cfg: &MiaConfig,
    master_seed: u64,
) -> Result<Vec<(AttackReport, u64)>> {
    if eps_grid.is_empty() {
        return Err(Error::param("epsilon grid must not be empty"));
    }
    if cfg.repeats == 0 {
        return Err(Error::param("repeats must be positive"));
    }
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::param("train fraction must lie in (0, 1)"));
    }
    let mut out = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let eps_seed = derive_seed(master_seed, "mia", &format!("eps={eps}"));
        let mut accs = Vec::with_capacity(cfg.repeats);
        let mut aucs = Vec::with_capacity(cfg.repeats);
        for rep in 0..cfg.repeats {
            let seed = derive_seed(eps_seed, "mia-repeat", &rep.to_string());
            let mut samples = build_mia_dataset_from(base, target, eps, cfg.worlds, seed)?;
            samples.shuffle(&mut rng_from_seed(seed ^ 0x5eed));
            let n_train = ((samples.len() as f64) * cfg.train_fraction).round() as usize;
            let (train, test) = samples.split_at(n_train);
            let model = fit_logistic(train, cfg.iters, cfg.lr)?;
            accs.push(model.accuracy(test));
            let scores: Vec<f64> = test.iter().map(|s| model.score(s.features())).collect();
            let labels: Vec<bool> = test.iter().map(|s| s.member).collect();
            aucs.push(auc(&scores, &labels)?);
        }
        let (accuracy_mean, accuracy_ci95) = mean_ci95(&accs);
        let (auc_mean, auc_ci95) = mean_ci95(&aucs);
        out.push((
            AttackReport { epsilon: eps, accuracy_mean, accuracy_ci95, auc_mean, auc_ci95, repeats: cfg.repeats },
            eps_seed,
        ));
    }
    Ok(out)
}
