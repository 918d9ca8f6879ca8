//! Privacy parameters, adjacency models and composition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `(epsilon, delta)` guarantee.
///
/// [`PrivacyParams::new`] enforces `epsilon > 0` and `0 <= delta < 1` for
/// caller-supplied budgets. Derived guarantees (composition, mechanism F with
/// `t = k`) may carry `delta >= 1`, which [`PrivacyParams::is_vacuous`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::param(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::param(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }

    pub fn is_vacuous(&self) -> bool {
        self.delta >= 1.0
    }
}

/// How two datasets are considered neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdjacencyModel {
    /// Same size, one record replaced. Used for the entropy bound.
    Replacement,
    /// One record added or removed. Used for mechanism F.
    AddRemove,
}

impl AdjacencyModel {
    /// Whether two histograms over the same bins are neighbours under this
    /// model.
    pub fn adjacent(&self, a: &[u64], b: &[u64]) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let na: u64 = a.iter().sum();
        let nb: u64 = b.iter().sum();
        let l1: u64 = a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y)).sum();
        match self {
            AdjacencyModel::Replacement => na == nb && l1 == 2,
            AdjacencyModel::AddRemove => na.abs_diff(nb) == 1 && l1 == 1,
        }
    }
}

/// Basic sequential composition: epsilons and deltas add.
pub fn compose_sequential(budgets: &[PrivacyParams]) -> Result<PrivacyParams> {
    if budgets.is_empty() {
        return Err(Error::param("cannot compose an empty list of mechanisms"));
    }
    Ok(PrivacyParams {
        epsilon: budgets.iter().map(|p| p.epsilon).sum(),
        delta: budgets.iter().map(|p| p.delta).sum(),
    })
}

/// Advanced composition of `k` adaptively chosen `(eps0, delta0)` mechanisms:
/// `epsilon = sqrt(2 k ln(1/delta')) eps0 + k eps0 (e^eps0 - 1)`,
/// `delta = k delta0 + delta'`.
pub fn compose_advanced(k: u64, eps0: f64, delta0: f64, delta_prime: f64) -> Result<PrivacyParams> {
    if k == 0 {
        return Err(Error::param("k must be positive"));
    }
    if !(eps0.is_finite() && eps0 > 0.0) {
        return Err(Error::param(format!("eps0 must be positive, got {eps0}")));
    }
    if !(0.0..1.0).contains(&delta0) {
        return Err(Error::param(format!("delta0 must lie in [0, 1), got {delta0}")));
    }
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(Error::param(format!("delta' must lie in (0, 1), got {delta_prime}")));
    }
    let kf = k as f64;
    let epsilon = (2.0 * kf * (1.0 / delta_prime).ln()).sqrt() * eps0 + kf * eps0 * eps0.exp_m1();
    Ok(PrivacyParams { epsilon, delta: kf * delta0 + delta_prime })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_examples() {
        let one = compose_sequential(&[PrivacyParams::new(1.0, 0.0).unwrap()]).unwrap();
        assert_eq!(one, PrivacyParams { epsilon: 1.0, delta: 0.0 });

        let p = PrivacyParams::new(0.5, 1e-5).unwrap();
        let two = compose_sequential(&[p, p]).unwrap();
        assert_eq!(two.epsilon, 1.0);
        assert_eq!(two.delta, 2e-5);

        let tenth = PrivacyParams::pure(0.1).unwrap();
        let ten = compose_sequential(&[tenth; 10]).unwrap();
        assert!((ten.epsilon - 1.0).abs() < 1e-12);
        assert_eq!(ten.delta, 0.0);

        assert!(compose_sequential(&[]).is_err());
    }

    #[test]
    fn advanced_examples() {
        let a = compose_advanced(1, 0.1, 0.0, 1e-6).unwrap();
        assert!((a.epsilon - 0.5362).abs() < 1e-4, "{}", a.epsilon);
        // direct evaluation gives 0.48990; the commonly quoted 0.4902 is off
        // in the fourth decimal
        let b = compose_advanced(100, 0.01, 0.0, 1e-5).unwrap();
        assert!((b.epsilon - 0.489_902_758_302_976).abs() < 1e-12, "{}", b.epsilon);
        assert!((b.epsilon - 0.4902).abs() < 5e-4);
        for k in [1u64, 7, 40] {
            let c = compose_advanced(k, 0.2, 1e-7, 1e-6).unwrap();
            assert_eq!(c.delta, k as f64 * 1e-7 + 1e-6);
        }
    }

    #[test]
    fn advanced_rejects_bad_delta_prime() {
        assert!(compose_advanced(3, 0.1, 0.0, 0.0).is_err());
        assert!(compose_advanced(3, 0.1, 0.0, -1e-3).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(PrivacyParams::new(0.0, 0.0).is_err());
        assert!(PrivacyParams::new(1.0, 1.0).is_err());
        assert!(PrivacyParams::new(1.0, -0.1).is_err());
        assert!(!PrivacyParams::new(1.0, 0.5).unwrap().is_vacuous());
    }

    #[test]
    fn adjacency_models() {
        assert!(AdjacencyModel::Replacement.adjacent(&[3, 1, 0], &[2, 2, 0]));
        assert!(!AdjacencyModel::Replacement.adjacent(&[3, 1, 0], &[3, 1, 1]));
        assert!(AdjacencyModel::AddRemove.adjacent(&[3, 1, 0], &[3, 1, 1]));
        assert!(!AdjacencyModel::AddRemove.adjacent(&[3, 1, 0], &[3, 1, 0]));
    }
}
