use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::mechanisms::{release_laplace_with, rng_from_seed};
use crate::privacy::AdjacencyModel;
use crate::results::ExperimentResult;
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkageGuess {
    D,
    DPrime,
}

fn sq_dist(a: &[u64], b: &[u64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x as f64 - y as f64).powi(2)).sum()
}

/// Guesses which reference produced `release` by Euclidean distance on the
/// count vectors. Ties go to `D`.
pub fn linkage_attack(release: &Histogram, ref_d: &Histogram, ref_d_prime: &Histogram) -> Result<LinkageGuess> {
    release.same_spec(ref_d)?;
    release.same_spec(ref_d_prime)?;
    let a = sq_dist(release.counts(), ref_d.counts());
    let b = sq_dist(release.counts(), ref_d_prime.counts());
    Ok(if b < a { LinkageGuess::DPrime } else { LinkageGuess::D })
}

/// Accuracy of the linkage attack per epsilon over `trials` Laplace releases
/// drawn alternately from `D` and `D'`.
pub fn linkage_curve(
    d: &Histogram,
    d_prime: &Histogram,
    eps_grid: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<ExperimentResult>> {
    d.same_spec(d_prime)?;
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    if !AdjacencyModel::Replacement.adjacent(d.counts(), d_prime.counts()) {
        warn!("linkage references are not replacement-adjacent");
    }
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let seed = derive_seed(master_seed, "linkage", &format!("eps={eps}"));
        let mut rng = rng_from_seed(seed);
        let mut correct = 0usize;
        for i in 0..trials {
            let (source, truth) = if i % 2 == 0 { (d, LinkageGuess::D) } else { (d_prime, LinkageGuess::DPrime) };
            let (_, released) = release_laplace_with(source, eps, &mut rng)?;
            if linkage_attack(&released, d, d_prime)? == truth {
                correct += 1;
            }
        }
        rows.push(
            ExperimentResult::new("linkage", seed)
                .param("epsilon", eps)
                .param("trials", trials)
                .metric("accuracy", correct as f64 / trials as f64),
        );
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(c: &[u64]) -> Histogram {
        Histogram::from_raw_counts(c.to_vec()).unwrap()
    }

    #[test]
    fn exact_match_and_tie_break() {
        let d = h(&[5, 3, 2]);
        let dp = h(&[4, 4, 2]);
        assert_eq!(linkage_attack(&d, &d, &dp).unwrap(), LinkageGuess::D);
        assert_eq!(linkage_attack(&dp, &d, &dp).unwrap(), LinkageGuess::DPrime);
        // equidistant from both references
        let mid = h(&[5, 4, 2]);
        assert_eq!(linkage_attack(&mid, &d, &dp).unwrap(), LinkageGuess::D);
    }

    #[test]
    fn spec_mismatch_rejected() {
        assert!(linkage_attack(&h(&[1, 2]), &h(&[1, 2, 3]), &h(&[1, 2])).is_err());
    }

    #[test]
    fn noiseless_and_noisy_regimes() {
        let d = h(&[30, 20, 10, 5]);
        let dp = h(&[29, 21, 10, 5]);
        let rows = linkage_curve(&d, &dp, &[1e-3, 1e9], 2000, 42).unwrap();
        let low = rows[0].get_metric("accuracy").unwrap();
        let high = rows[1].get_metric("accuracy").unwrap();
        assert!((low - 0.5).abs() <= 0.03, "{low}");
        assert!(high >= 0.95, "{high}");
    }
}
