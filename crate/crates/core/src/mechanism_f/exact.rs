use serde::{Deserialize, Serialize};

use super::{FParams, MechanismF, Universe};
use crate::error::{Error, Result};

/// Largest `|U| * |D|` accepted for exact enumeration.
pub const ENUMERATION_LIMIT: usize = 1_000_000;

/// Per-attempt output sub-distribution of mechanism F.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDistribution {
    /// `Pr{a single attempt outputs y}` indexed by `y`.
    pub accept: Vec<f64>,
    /// Probability that a single attempt is rejected.
    pub reject: f64,
}

impl ExactDistribution {
    pub fn accept_mass(&self) -> f64 {
        self.accept.iter().sum()
    }

    /// Output distribution of the resampling loop with unlimited attempts.
    pub fn conditional(&self) -> Option<Vec<f64>> {
        let total = self.accept_mass();
        (total > 0.0).then(|| self.accept.iter().map(|p| p / total).collect())
    }
}

pub(crate) fn check_enumeration(universe: &Universe, dataset_len: usize) -> Result<()> {
    let size = universe.len().saturating_mul(dataset_len);
    if size > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge { size, limit: ENUMERATION_LIMIT });
    }
    Ok(())
}

impl MechanismF {
    /// `Pr{F(D) = y}` for one attempt:
    /// `(1/|D|) sum_j pt(D, j, y) sum_{s in C_j(D, y)} p_s(y)`.
    pub fn exact_distribution(&self) -> ExactDistribution {
        let n = self.dataset().len() as f64;
        let accept: Vec<f64> = (0..self.universe_len())
            .map(|y| self.acceptance_masses(y).values().sum::<f64>() / n)
            .collect();
        let reject = (1.0 - accept.iter().sum::<f64>()).max(0.0);
        ExactDistribution { accept, reject }
    }
}

/// Exact per-attempt output distribution by enumeration over the universe and
/// dataset.
pub fn exact_output_distribution(dataset: &[usize], p: &FParams, universe: &Universe) -> Result<ExactDistribution> {
    check_enumeration(universe, dataset.len())?;
    Ok(MechanismF::new(dataset, *p, universe)?.exact_distribution())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::rng_from_seed;

    #[test]
    fn always_pass_is_seed_mixture() {
        let u = Universe::line(5).unwrap();
        let d = vec![2, 2, 2];
        let p = FParams::new(3, 1, 2.0, 0.5);
        let exact = exact_output_distribution(&d, &p, &u).unwrap();
        let mech = MechanismF::new(&d, p, &u).unwrap();
        for y in 0..5 {
            assert!((exact.accept[y] - mech.proposal().mass(2, y)).abs() < 1e-12);
        }
        assert!(exact.reject.abs() < 1e-12);
    }

    #[test]
    fn always_reject_has_unit_reject_mass() {
        let u = Universe::line(4).unwrap();
        let d = vec![0, 3];
        let p = FParams::new(5, 1, 2.0, 1e4);
        let exact = exact_output_distribution(&d, &p, &u).unwrap();
        assert!(exact.accept.iter().all(|&a| a == 0.0));
        assert_eq!(exact.reject, 1.0);
        assert!(exact.conditional().is_none());
    }

    #[test]
    fn masses_sum_to_one() {
        let u = Universe::line(6).unwrap();
        for (d, p) in [
            (vec![0, 1, 1, 5], FParams::new(3, 2, 2.0, 0.5)),
            (vec![0, 2, 4], FParams::new(3, 1, 1.3, 1.1).with_tau(0.4)),
            (vec![3; 8], FParams::new(8, 4, 5.0, 0.2)),
        ] {
            let e = exact_output_distribution(&d, &p, &u).unwrap();
            assert!((e.accept_mass() + e.reject - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn enumeration_guard() {
        let u = Universe::line(2000).unwrap();
        let d = vec![0; 600];
        let err = exact_output_distribution(&d, &FParams::new(3, 1, 2.0, 0.5), &u).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { .. }));
    }

    #[test]
    fn monte_carlo_agrees_with_enumeration() {
        let u = Universe::line(3).unwrap();
        let d = vec![0, 1, 1, 2];
        let p = FParams::new(3, 2, 2.0, 0.5);
        let mech = MechanismF::new(&d, p, &u).unwrap();
        let exact = mech.exact_distribution();
        let mut rng = rng_from_seed(17);
        let n = 200_000usize;
        let mut hits = vec![0usize; 3];
        for _ in 0..n {
            let a = mech.attempt(&mut rng);
            if a.passed {
                hits[a.candidate] += 1;
            }
        }
        for y in 0..3 {
            let p = exact.accept[y];
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let f = hits[y] as f64 / n as f64;
            assert!((f - p).abs() <= 3.0 * se, "y={y}: {f} vs {p}");
        }
    }
}
