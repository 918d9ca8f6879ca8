//! Mechanism F: privacy-tested synthetic record generation.
//!
//! One attempt draws a seed record uniformly from the dataset, proposes a
//! candidate `y` from the seed's proposal distribution, locates the seed's cell
//! for `y` and runs the privacy test `L >= k - |cell|`. With the geometric
//! privacy-test variable used here, `Pr{L >= a} = min(1, e^(-eps0 a))`, and the
//! mechanism is `(eps0 + ln(1 + gamma/t), e^(-eps0 (k - t)))`-DP under
//! add/remove adjacency.
//!
//! Cells are bands of proposal mass: `I_s(y) = floor(-ln p_s(y) / ln gamma)`.
//! Any two seeds sharing a cell therefore have proposal masses within a factor
//! `gamma` of each other.

mod audit;
mod exact;
mod universe;

pub use audit::{mc_dp_audit, AuditReport, AuditRow};
pub use exact::{exact_output_distribution, ExactDistribution, ENUMERATION_LIMIT};
pub use universe::{Distance, Universe};

use std::collections::BTreeMap;

use log::warn;
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::privacy::PrivacyParams;
use crate::results::ExperimentResult;
use crate::seed::derive_seed;

/// Default attempt budget for [`generate`].
pub const DEFAULT_MAX_CHECK: u64 = 10_000;

/// Cell index reserved for zero proposal mass.
pub const ZERO_MASS_CELL: u64 = u64::MAX;

fn default_tau() -> f64 {
    1.0
}

fn default_max_check() -> u64 {
    DEFAULT_MAX_CHECK
}

/// Tuning parameters of mechanism F. Serialises as the JSON parameter file
/// `{k, t, gamma, eps0, tau, max_check}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FParams {
    /// Privacy threshold; larger is stricter.
    pub k: u64,
    /// Partition threshold.
    pub t: u64,
    /// Band ratio of the partition, `> 1`.
    pub gamma: f64,
    /// Base privacy parameter of the test variable.
    pub eps0: f64,
    /// Proposal temperature.
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_max_check")]
    pub max_check: u64,
}

impl FParams {
    pub fn new(k: u64, t: u64, gamma: f64, eps0: f64) -> Self {
        Self { k, t, gamma, eps0, tau: default_tau(), max_check: DEFAULT_MAX_CHECK }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_max_check(mut self, max_check: u64) -> Self {
        self.max_check = max_check;
        self
    }

    fn intrinsic_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            v.push(format!("gamma must exceed 1 (got {})", self.gamma));
        }
        if self.t == 0 {
            v.push("t must be at least 1".into());
        }
        if self.k == 0 {
            v.push("k must be at least 1".into());
        }
        if self.t > self.k {
            v.push(format!("t must not exceed k (t = {}, k = {})", self.t, self.k));
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            v.push(format!("eps0 must be positive (got {})", self.eps0));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            v.push(format!("tau must be positive (got {})", self.tau));
        }
        if self.max_check == 0 {
            v.push("max_check must be at least 1".into());
        }
        v
    }
}

/// Checks the sufficient parameter domain (`gamma > 1`, `t <= k`,
/// `k <= |D|`) plus basic positivity, returning every violation found.
pub fn validate_params(p: &FParams, dataset_size: usize) -> std::result::Result<(), Vec<String>> {
    let mut v = p.intrinsic_violations();
    if p.k > dataset_size as u64 {
        v.push(format!("k exceeds dataset size (k = {}, |D| = {dataset_size})", p.k));
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// `epsilon = eps0 + ln(1 + gamma/t)`, `delta = e^(-eps0 (k - t))`.
pub fn derived_privacy(p: &FParams) -> Result<PrivacyParams> {
    let v = p.intrinsic_violations();
    if !v.is_empty() {
        return Err(Error::InvalidFParams(v));
    }
    let epsilon = p.eps0 + (p.gamma / p.t as f64).ln_1p();
    let delta = (-p.eps0 * (p.k - p.t) as f64).exp();
    if p.t == p.k {
        warn!("t = k gives delta = 1: the guarantee is vacuous");
    }
    Ok(PrivacyParams { epsilon, delta })
}

/// `Pr{L >= a} = min(1, e^(-eps0 a))`.
pub fn privacy_test_survival(a: i64, eps0: f64) -> f64 {
    if a <= 0 {
        1.0
    } else {
        (-eps0 * a as f64).exp()
    }
}

/// Draws the privacy-test variable: `floor(E / eps0)` with `E ~ Exp(1)`, whose
/// survival function is [`privacy_test_survival`].
pub fn sample_test_variable<R: Rng + ?Sized>(eps0: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.sample(Open01);
    let l = (-u.ln() / eps0).floor();
    if l >= u64::MAX as f64 {
        u64::MAX
    } else {
        l as u64
    }
}

/// Band of `mass` under ratio `gamma`; [`ZERO_MASS_CELL`] when `mass == 0`.
pub fn band_index(mass: f64, gamma: f64) -> u64 {
    if mass <= 0.0 {
        return ZERO_MASS_CELL;
    }
    let x = (-mass.ln() / gamma.ln()).floor();
    if x <= 0.0 {
        0
    } else {
        x as u64
    }
}

/// Softmax proposal over the universe: `p_s(y) ∝ exp(-distance(s, y) / tau)`.
#[derive(Debug, Clone)]
pub struct Proposal {
    probs: Vec<Vec<f64>>,
    cdfs: Vec<Vec<f64>>,
}

impl Proposal {
    pub fn new(universe: &Universe, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::param(format!("tau must be positive, got {tau}")));
        }
        let n = universe.len();
        let mut probs = Vec::with_capacity(n);
        let mut cdfs = Vec::with_capacity(n);
        for s in 0..n {
            let logits: Vec<f64> = (0..n).map(|y| -universe.distance(s, y) / tau).collect();
            let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
            let z: f64 = w.iter().sum();
            let row: Vec<f64> = w.iter().map(|x| x / z).collect();
            let mut acc = 0.0;
            let cdf = row
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect();
            probs.push(row);
            cdfs.push(cdf);
        }
        Ok(Self { probs, cdfs })
    }

    pub fn mass(&self, seed: usize, y: usize) -> f64 {
        self.probs[seed][y]
    }

    pub fn row(&self, seed: usize) -> &[f64] {
        &self.probs[seed]
    }

    pub fn sample<R: Rng + ?Sized>(&self, seed: usize, rng: &mut R) -> usize {
        let cdf = &self.cdfs[seed];
        let u = rng.random::<f64>() * cdf[cdf.len() - 1];
        cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
    }
}

/// `p_s(y)` for a single pair.
pub fn proposal_mass(seed: usize, y: usize, tau: f64, universe: &Universe) -> Result<f64> {
    universe.check(seed)?;
    universe.check(y)?;
    Ok(Proposal::new(universe, tau)?.mass(seed, y))
}

/// `I_s(y) = floor(-ln p_s(y) / ln gamma)`.
pub fn partition_index(seed: usize, y: usize, p: &FParams, universe: &Universe) -> Result<u64> {
    Ok(band_index(proposal_mass(seed, y, p.tau, universe)?, p.gamma))
}

/// Seeds of the dataset that share partition index `j` for a fixed candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub j: u64,
    /// Universe elements of the member seeds, one entry per dataset record.
    pub members: Vec<usize>,
    /// `sum_{s in cell} p_s(y)`.
    pub mass: f64,
}

impl Cell {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenerationOutcome {
    Accepted(usize),
    Exhausted(u64),
}

/// One pass through seed selection, proposal and privacy test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attempt {
    pub seed: usize,
    pub candidate: usize,
    pub cell: u64,
    pub cell_size: u64,
    pub passed: bool,
}

/// Mechanism F bound to one dataset, with proposal masses and cell sizes
/// precomputed.
#[derive(Debug, Clone)]
pub struct MechanismF {
    params: FParams,
    proposal: Proposal,
    dataset: Vec<usize>,
    multiplicity: Vec<u64>,
    /// `index[s][y]`
    index: Vec<Vec<u64>>,
    /// `cell_size[y][s]`: number of records of the dataset in the cell of
    /// element `s` for candidate `y`.
    cell_size: Vec<Vec<u64>>,
}

impl MechanismF {
    /// Builds the mechanism without checking `k <= |D|`; the exact
    /// distribution is defined for any dataset.
    pub fn new(dataset: &[usize], params: FParams, universe: &Universe) -> Result<Self> {
        let v = params.intrinsic_violations();
        if !v.is_empty() {
            return Err(Error::InvalidFParams(v));
        }
        if dataset.is_empty() {
            return Err(Error::param("dataset must not be empty"));
        }
        for &x in dataset {
            universe.check(x)?;
        }
        let n = universe.len();
        let proposal = Proposal::new(universe, params.tau)?;
        let mut multiplicity = vec![0u64; n];
        for &x in dataset {
            multiplicity[x] += 1;
        }
        let index: Vec<Vec<u64>> = (0..n)
            .map(|s| (0..n).map(|y| band_index(proposal.mass(s, y), params.gamma)).collect())
            .collect();
        let cell_size = (0..n)
            .map(|y| {
                let mut by_cell: BTreeMap<u64, u64> = BTreeMap::new();
                for s in 0..n {
                    *by_cell.entry(index[s][y]).or_default() += multiplicity[s];
                }
                (0..n).map(|s| by_cell[&index[s][y]]).collect()
            })
            .collect();
        Ok(Self { params, proposal, dataset: dataset.to_vec(), multiplicity, index, cell_size })
    }

    /// Like [`MechanismF::new`] but also enforces the full parameter domain.
    pub fn checked(dataset: &[usize], params: FParams, universe: &Universe) -> Result<Self> {
        validate_params(&params, dataset.len()).map_err(Error::InvalidFParams)?;
        Self::new(dataset, params, universe)
    }

    pub fn params(&self) -> &FParams {
        &self.params
    }

    pub fn proposal(&self) -> &Proposal {
        &self.proposal
    }

    pub fn dataset(&self) -> &[usize] {
        &self.dataset
    }

    pub fn universe_len(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn index(&self, seed: usize, y: usize) -> u64 {
        self.index[seed][y]
    }

    /// `|C_{I_s(y)}(D, y)|`.
    pub fn cell_size(&self, seed: usize, y: usize) -> u64 {
        self.cell_size[y][seed]
    }

    /// `pt(D, j, y)` for the cell holding `size` records.
    pub fn pass_probability(&self, size: u64) -> f64 {
        privacy_test_survival(self.params.k as i64 - size as i64, self.params.eps0)
    }

    /// Every non-empty cell for candidate `y`, keyed by partition index.
    pub fn cells(&self, y: usize) -> BTreeMap<u64, Cell> {
        let mut cells: BTreeMap<u64, Cell> = BTreeMap::new();
        for &s in &self.dataset {
            let j = self.index[s][y];
            let cell = cells.entry(j).or_insert_with(|| Cell { j, members: Vec::new(), mass: 0.0 });
            cell.members.push(s);
            cell.mass += self.proposal.mass(s, y);
        }
        cells
    }

    /// `q(D, j, y) = pt(D, j, y) * sum_{s in C_j(D, y)} p_s(y)` for every
    /// non-empty cell.
    pub fn acceptance_masses(&self, y: usize) -> BTreeMap<u64, f64> {
        self.cells(y)
            .into_iter()
            .map(|(j, c)| (j, self.pass_probability(c.size() as u64) * c.mass))
            .collect()
    }

    pub fn attempt<R: Rng + ?Sized>(&self, rng: &mut R) -> Attempt {
        let seed = self.dataset[rng.random_range(0..self.dataset.len())];
        let candidate = self.proposal.sample(seed, rng);
        let cell = self.index[seed][candidate];
        let cell_size = self.cell_size[candidate][seed];
        let l = sample_test_variable(self.params.eps0, rng);
        let threshold = self.params.k as i64 - cell_size as i64;
        let passed = threshold <= 0 || l >= threshold as u64;
        Attempt { seed, candidate, cell, cell_size, passed }
    }

    /// Repeats attempts until one passes or `max_check` is spent.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> GenerationOutcome {
        for _ in 0..self.params.max_check {
            let a = self.attempt(rng);
            if a.passed {
                return GenerationOutcome::Accepted(a.candidate);
            }
        }
        GenerationOutcome::Exhausted(self.params.max_check)
    }

    /// Fraction of `attempts` single attempts that pass the privacy test.
    pub fn pass_rate<R: Rng + ?Sized>(&self, attempts: u64, rng: &mut R) -> f64 {
        let passed = (0..attempts).filter(|_| self.attempt(rng).passed).count();
        passed as f64 / attempts as f64
    }
}

/// Runs mechanism F once on `dataset`, checking the parameter domain first.
pub fn generate<R: Rng + ?Sized>(
    dataset: &[usize],
    p: &FParams,
    universe: &Universe,
    rng: &mut R,
) -> Result<GenerationOutcome> {
    Ok(MechanismF::checked(dataset, *p, universe)?.generate(rng))
}

/// Pass rate of single attempts for every `(k, gamma)` cell of the grid.
/// `base` supplies `t`, `eps0` and `tau`. Cells outside the parameter domain
/// are skipped with a warning.
pub fn pass_rate_experiment(
    dataset: &[usize],
    universe: &Universe,
    base: &FParams,
    k_values: &[u64],
    gamma_grid: &[f64],
    attempts: u64,
    master_seed: u64,
) -> Result<Vec<ExperimentResult>> {
    if attempts == 0 {
        return Err(Error::param("attempts must be positive"));
    }
    // Every cell replays the same attempt stream: a fixed dataset makes the
    // draws per attempt identical across cells, so differences between cells
    // come from the parameters alone.
    let seed = derive_seed(master_seed, "pass-rate", &format!("t={},eps0={},tau={}", base.t, base.eps0, base.tau));
    let mut rows = Vec::new();
    for &k in k_values {
        for &gamma in gamma_grid {
            let p = FParams { k, gamma, ..*base };
            if let Err(v) = validate_params(&p, dataset.len()) {
                warn!("skipping k = {k}, gamma = {gamma}: {}", v.join("; "));
                continue;
            }
            let mut rng = crate::mechanisms::rng_from_seed(seed);
            let mech = MechanismF::new(dataset, p, universe)?;
            let rate = mech.pass_rate(attempts, &mut rng);
            let dp = derived_privacy(&p)?;
            rows.push(
                ExperimentResult::new("pass-rate", seed)
                    .param("k", k)
                    .param("t", p.t)
                    .param("gamma", gamma)
                    .param("eps0", p.eps0)
                    .param("tau", p.tau)
                    .param("attempts", attempts)
                    .metric("pass_rate", rate)
                    .metric("epsilon", dp.epsilon)
                    .metric("delta", dp.delta),
            );
        }
    }
    Ok(rows)
}
