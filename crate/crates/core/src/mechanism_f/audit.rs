use serde::{Deserialize, Serialize};

use super::exact::check_enumeration;
use super::{derived_privacy, FParams, MechanismF, Universe};
use crate::error::{Error, Result};

/// Relative slack for floating-point comparisons against the guarantee.
const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub y: usize,
    /// `Pr{F(D) = y}` per attempt.
    pub pr_d: f64,
    /// `Pr{F(D') = y}` per attempt.
    pub pr_d_prime: f64,
    /// `|C_{I_d'(y)}(D, y)|`, the size of the added record's cell in `D`.
    pub added_cell_size: u64,
    pub forward_ratio: f64,
    pub reverse_ratio: f64,
    /// `max(0, Pr{F(D') = y} - e^epsilon Pr{F(D) = y})`.
    pub residual: f64,
}

/// Exact check of the `(epsilon, delta)` guarantee for `D` versus
/// `D' = D ∪ {d'}`.
///
/// `forward_max_ratio` bounds `Pr{F(D)=y} / Pr{F(D')=y}` over every `y`.
/// `reverse_max_ratio` bounds `Pr{F(D')=y} / Pr{F(D)=y}` over outcomes whose
/// added cell already holds at least `t` records of `D`; the remaining outcomes
/// are covered by `delta` through `delta_residual`. `reverse_max_ratio_all`
/// is the unrestricted reverse ratio, reported for information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub epsilon: f64,
    pub delta: f64,
    pub forward_max_ratio: f64,
    pub reverse_max_ratio: f64,
    pub reverse_max_ratio_all: f64,
    pub max_ratio: f64,
    pub delta_residual: f64,
    /// Cells other than the one holding `d'` whose acceptance mass changed.
    pub cell_equality_violations: usize,
    /// Cells whose acceptance mass decreased when `d'` was added.
    pub monotonicity_violations: usize,
    pub rows: Vec<AuditRow>,
    pub passed: bool,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        // neither dataset can produce y
        1.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// Enumerates both per-attempt output distributions and checks the derived
/// guarantee together with the cell-level lemmas behind it.
pub fn mc_dp_audit(dataset: &[usize], d_prime: usize, p: &FParams, universe: &Universe) -> Result<AuditReport> {
    if (dataset.len() as u64) < p.k {
        return Err(Error::param(format!("audit needs |D| >= k (|D| = {}, k = {})", dataset.len(), p.k)));
    }
    check_enumeration(universe, dataset.len() + 1)?;
    let privacy = derived_privacy(p)?;
    let e_eps = privacy.epsilon.exp();

    let mut extended = dataset.to_vec();
    extended.push(d_prime);
    let small = MechanismF::new(dataset, *p, universe)?;
    let large = MechanismF::new(&extended, *p, universe)?;
    let dist_small = small.exact_distribution();
    let dist_large = large.exact_distribution();

    let mut rows = Vec::with_capacity(universe.len());
    let mut cell_equality_violations = 0;
    let mut monotonicity_violations = 0;
    let (mut fwd, mut rev, mut rev_all, mut residual) = (1.0f64, 1.0f64, 1.0f64, 0.0f64);

    for y in 0..universe.len() {
        let j_added = large.index(d_prime, y);
        let q_small = small.acceptance_masses(y);
        let q_large = large.acceptance_masses(y);
        for (&i, &q) in &q_large {
            let before = q_small.get(&i).copied().unwrap_or(0.0);
            if i != j_added && before != q {
                cell_equality_violations += 1;
            }
            if before > q {
                monotonicity_violations += 1;
            }
        }
        if q_small.keys().any(|i| !q_large.contains_key(i)) {
            monotonicity_violations += 1;
        }

        let added_cell_size = small
            .cells(y)
            .get(&j_added)
            .map(|c| c.size() as u64)
            .unwrap_or(0);
        let (a, b) = (dist_small.accept[y], dist_large.accept[y]);
        let forward_ratio = ratio(a, b);
        let reverse_ratio = ratio(b, a);
        let r = (b - e_eps * a).max(0.0);
        fwd = fwd.max(forward_ratio);
        rev_all = rev_all.max(reverse_ratio);
        if added_cell_size >= p.t {
            rev = rev.max(reverse_ratio);
        }
        residual += r;
        rows.push(AuditRow {
            y,
            pr_d: a,
            pr_d_prime: b,
            added_cell_size,
            forward_ratio,
            reverse_ratio,
            residual: r,
        });
    }

    let max_ratio = fwd.max(rev);
    let passed = max_ratio <= e_eps * (1.0 + SLACK)
        && residual <= privacy.delta * (1.0 + SLACK) + 1e-15
        && cell_equality_violations == 0
        && monotonicity_violations == 0;
    Ok(AuditReport {
        epsilon: privacy.epsilon,
        delta: privacy.delta,
        forward_max_ratio: fwd,
        reverse_max_ratio: rev,
        reverse_max_ratio_all: rev_all,
        max_ratio,
        delta_residual: residual,
        cell_equality_violations,
        monotonicity_violations,
        rows,
        passed,
    })
}
