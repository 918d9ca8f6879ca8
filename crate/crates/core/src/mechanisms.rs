//! Noisy histogram release: Laplace and Gaussian count perturbation, and the
//! noise-then-resample synthetic baselines.
//!
//! Every mechanism draws its noise per bin, in bin order, from one generator,
//! and always consumes the same number of uniforms per bin. Two runs that share
//! a seed but differ in `epsilon` therefore see the same underlying uniforms,
//! which keeps parameter sweeps smooth.

use std::fmt;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::shannon_entropy_counts;
use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::privacy::PrivacyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismKind {
    Laplace,
    Gaussian,
    SyntheticLaplace,
    SyntheticGaussian,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 4] = [
        MechanismKind::Laplace,
        MechanismKind::Gaussian,
        MechanismKind::SyntheticLaplace,
        MechanismKind::SyntheticGaussian,
    ];

    pub fn needs_delta(&self) -> bool {
        matches!(self, MechanismKind::Gaussian | MechanismKind::SyntheticGaussian)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MechanismKind::Laplace => "laplace",
            MechanismKind::Gaussian => "gaussian",
            MechanismKind::SyntheticLaplace => "synthetic-laplace",
            MechanismKind::SyntheticGaussian => "synthetic-gaussian",
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// A released histogram alongside what produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleaseResult {
    pub original: Histogram,
    pub released: Histogram,
    /// Clipped real-valued counts before rounding. For the synthetic
    /// mechanisms these are the noisy counts that were normalised and
    /// resampled.
    pub noisy_counts: Vec<f64>,
    pub params: PrivacyParams,
    pub kind: MechanismKind,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityMetrics {
    /// `|H(original) - H(released)|` in bits.
    pub entropy_error: f64,
    /// Mean absolute per-bin count difference.
    pub count_mae: f64,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One draw from Laplace(0, scale) by inverse CDF.
pub fn laplace_noise<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    if u < 0.5 {
        scale * (2.0 * u).ln()
    } else {
        -scale * (2.0 * (1.0 - u)).ln()
    }
}

/// One draw from Normal(0, sd) by Box-Muller, always two uniforms.
pub fn gaussian_noise<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    let u1: f64 = rng.sample(Open01);
    let u2: f64 = rng.random();
    sd * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Classical Gaussian-mechanism calibration for a sensitivity-1 count:
/// `sigma = sqrt(2 ln(1.25 / delta)) / epsilon`.
///
/// The classical analysis covers `epsilon <= 1`; larger values are accepted
/// so utility sweeps can extend past it.
pub fn gaussian_sigma(params: &PrivacyParams) -> Result<f64> {
    if !(params.epsilon.is_finite() && params.epsilon > 0.0) {
        return Err(Error::param(format!("epsilon must be positive, got {}", params.epsilon)));
    }
    if !(params.delta > 0.0 && params.delta < 1.0) {
        return Err(Error::param(format!(
            "the Gaussian mechanism needs delta in (0, 1), got {}; use Laplace for pure epsilon",
            params.delta
        )));
    }
    Ok((2.0 * (1.25 / params.delta).ln()).sqrt() / params.epsilon)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn perturb<R: Rng + ?Sized>(hist: &Histogram, rng: &mut R, noise: impl Fn(&mut R) -> f64) -> Vec<f64> {
    hist.counts().iter().map(|&c| (c as f64 + noise(rng)).max(0.0)).collect()
}

fn rounded(hist: &Histogram, noisy: &[f64]) -> Result<Histogram> {
    Histogram::from_counts(*hist.spec(), noisy.iter().map(|&x| x.round() as u64).collect())
}

/// Clipped Laplace-noised counts with scale `1/epsilon`.
pub fn laplace_counts<R: Rng + ?Sized>(hist: &Histogram, epsilon: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_epsilon(epsilon)?;
    let scale = 1.0 / epsilon;
    Ok(perturb(hist, rng, |r| laplace_noise(scale, r)))
}

pub fn gaussian_counts<R: Rng + ?Sized>(hist: &Histogram, params: &PrivacyParams, rng: &mut R) -> Result<Vec<f64>> {
    let sd = gaussian_sigma(params)?;
    Ok(perturb(hist, rng, |r| gaussian_noise(sd, r)))
}

pub fn release_laplace_with<R: Rng + ?Sized>(hist: &Histogram, epsilon: f64, rng: &mut R) -> Result<(Vec<f64>, Histogram)> {
    let noisy = laplace_counts(hist, epsilon, rng)?;
    let released = rounded(hist, &noisy)?;
    Ok((noisy, released))
}

/// Adds Laplace(1/epsilon) noise to every count, clips at 0 and rounds.
pub fn release_laplace(hist: &Histogram, epsilon: f64, seed: u64) -> Result<ReleaseResult> {
    let mut rng = rng_from_seed(seed);
    let (noisy_counts, released) = release_laplace_with(hist, epsilon, &mut rng)?;
    Ok(ReleaseResult {
        original: hist.clone(),
        released,
        noisy_counts,
        params: PrivacyParams { epsilon, delta: 0.0 },
        kind: MechanismKind::Laplace,
        seed,
    })
}

/// Adds Gaussian noise with [`gaussian_sigma`], clips at 0 and rounds.
pub fn release_gaussian(hist: &Histogram, params: PrivacyParams, seed: u64) -> Result<ReleaseResult> {
    let mut rng = rng_from_seed(seed);
    let noisy_counts = gaussian_counts(hist, &params, &mut rng)?;
    let released = rounded(hist, &noisy_counts)?;
    Ok(ReleaseResult {
        original: hist.clone(),
        released,
        noisy_counts,
        params,
        kind: MechanismKind::Gaussian,
        seed,
    })
}

/// Draws `n_out` records from `probs` by inverse CDF, one uniform per record.
pub fn multinomial<R: Rng + ?Sized>(probs: &[f64], n_out: u64, rng: &mut R) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let last_positive = probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..n_out {
        let u = rng.random::<f64>() * total;
        let i = cdf.partition_point(|&c| c <= u).min(last_positive);
        counts[i] += 1;
    }
    counts
}

/// Normalises clipped noisy counts into a probability vector; all-zero input
/// falls back to uniform.
pub fn normalise(noisy: &[f64]) -> Vec<f64> {
    let total: f64 = noisy.iter().sum();
    if total > 0.0 {
        noisy.iter().map(|&x| x / total).collect()
    } else {
        vec![1.0 / noisy.len() as f64; noisy.len()]
    }
}

/// Noise-then-resample baseline: perturb counts with `base`, normalise, and
/// draw exactly `n_out` records.
pub fn release_synthetic(
    hist: &Histogram,
    params: PrivacyParams,
    base: MechanismKind,
    n_out: u64,
    seed: u64,
) -> Result<ReleaseResult> {
    if n_out == 0 {
        return Err(Error::param("n_out must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let (noisy_counts, kind) = match base {
        MechanismKind::Laplace => (laplace_counts(hist, params.epsilon, &mut rng)?, MechanismKind::SyntheticLaplace),
        MechanismKind::Gaussian => (gaussian_counts(hist, &params, &mut rng)?, MechanismKind::SyntheticGaussian),
        other => {
            return Err(Error::param(format!("synthetic release needs a laplace or gaussian base, got {other}")));
        }
    };
    let probs = normalise(&noisy_counts);
    let counts = multinomial(&probs, n_out, &mut rng);
    Ok(ReleaseResult {
        original: hist.clone(),
        released: Histogram::from_counts(*hist.spec(), counts)?,
        noisy_counts,
        params,
        kind,
        seed,
    })
}

/// Dispatches on `kind`. Synthetic mechanisms resample as many records as the
/// original holds.
pub fn release(hist: &Histogram, kind: MechanismKind, params: PrivacyParams, seed: u64) -> Result<ReleaseResult> {
    match kind {
        MechanismKind::Laplace => release_laplace(hist, params.epsilon, seed),
        MechanismKind::Gaussian => release_gaussian(hist, params, seed),
        MechanismKind::SyntheticLaplace => release_synthetic(hist, params, MechanismKind::Laplace, hist.total(), seed),
        MechanismKind::SyntheticGaussian => release_synthetic(hist, params, MechanismKind::Gaussian, hist.total(), seed),
    }
}

/// Entropy of a released histogram; an all-zero release carries no
/// distribution and scores 0.
pub fn released_entropy(released: &Histogram) -> f64 {
    shannon_entropy_counts(released.counts()).unwrap_or(0.0)
}

pub fn utility_metrics(orig: &Histogram, released: &Histogram) -> Result<UtilityMetrics> {
    orig.same_spec(released)?;
    let h_orig = shannon_entropy_counts(orig.counts())?;
    let h_rel = released_entropy(released);
    let count_mae = orig
        .counts()
        .iter()
        .zip(released.counts())
        .map(|(&a, &b)| a.abs_diff(b) as f64)
        .sum::<f64>()
        / orig.bins() as f64;
    Ok(UtilityMetrics { entropy_error: (h_orig - h_rel).abs(), count_mae })
}
