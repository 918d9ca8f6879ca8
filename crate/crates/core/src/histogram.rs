//! Equal-width one-dimensional histograms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equal-width binning of `[lo, hi]` into `m` bins.
///
/// Bin `i` covers `[lo + i*w, lo + (i+1)*w)` with `w = (hi - lo) / m`; the last
/// bin is closed on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    lo: f64,
    hi: f64,
    m: usize,
}

impl BinSpec {
    pub fn new(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::param(format!("bin range must be finite, got [{lo}, {hi}]")));
        }
        if lo >= hi {
            return Err(Error::param(format!("bin range requires lo < hi, got [{lo}, {hi}]")));
        }
        if m == 0 {
            return Err(Error::param("bin count must be at least 1"));
        }
        Ok(Self { lo, hi, m })
    }

    /// `m` bins spanning `[min, max]` of the data. A constant column gets the
    /// unit range `[v, v + 1]`.
    pub fn from_data(values: &[f64], m: usize) -> Result<Self> {
        check_finite(values)?;
        if values.is_empty() {
            return Err(Error::Data("cannot derive bin range from an empty column".into()));
        }
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if lo == hi {
            Self::new(lo, lo + 1.0, m)
        } else {
            Self::new(lo, hi, m)
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn bins(&self) -> usize {
        self.m
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.m as f64
    }

    /// Bin index of `x`; values outside the range land in the nearest edge bin.
    pub fn index_of(&self, x: f64) -> usize {
        if x <= self.lo {
            return 0;
        }
        if x >= self.hi {
            return self.m - 1;
        }
        let i = ((x - self.lo) / self.width()).floor() as usize;
        i.min(self.m - 1)
    }

    /// Left edges of every bin plus the right edge of the last.
    pub fn edges(&self) -> Vec<f64> {
        let w = self.width();
        (0..=self.m)
            .map(|i| if i == self.m { self.hi } else { self.lo + i as f64 * w })
            .collect()
    }
}

/// Per-bin counts over a [`BinSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    spec: BinSpec,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn from_counts(spec: BinSpec, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != spec.bins() {
            return Err(Error::SpecMismatch(format!(
                "{} counts for {} bins",
                counts.len(),
                spec.bins()
            )));
        }
        Ok(Self { spec, counts })
    }

    /// Histogram over bins `0..counts.len()` of the unit-width range
    /// `[0, counts.len()]`. Handy when only counts matter.
    pub fn from_raw_counts(counts: Vec<u64>) -> Result<Self> {
        let spec = BinSpec::new(0.0, counts.len().max(1) as f64, counts.len())?;
        Self::from_counts(spec, counts)
    }

    pub fn empty(spec: BinSpec) -> Self {
        Self { spec, counts: vec![0; spec.bins()] }
    }

    pub fn spec(&self) -> &BinSpec {
        &self.spec
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Total number of records.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn same_spec(&self, other: &Histogram) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(format!("{:?} vs {:?}", self.spec, other.spec)));
        }
        Ok(())
    }

    /// Moves one record from bin `from` to bin `to`, the replacement-adjacency
    /// step. Returns `None` when `from` is empty or the indices coincide.
    pub fn moved(&self, from: usize, to: usize) -> Option<Histogram> {
        if from == to || from >= self.bins() || to >= self.bins() || self.counts[from] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[from] -= 1;
        counts[to] += 1;
        Some(Histogram { spec: self.spec, counts })
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    let indices: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_finite())
        .map(|(i, _)| i)
        .collect();
    if indices.is_empty() {
        Ok(())
    } else {
        Err(Error::NonFinite { indices })
    }
}

/// Bins `values` under `spec`, clamping out-of-range values to the edge bins so
/// the record count is preserved.
pub fn build_histogram(values: &[f64], spec: BinSpec) -> Result<Histogram> {
    check_finite(values)?;
    let mut counts = vec![0u64; spec.bins()];
    for &v in values {
        counts[spec.index_of(v)] += 1;
    }
    Ok(Histogram { spec, counts })
}

/// All count vectors of length `m` summing to `n`, in lexicographic order.
pub fn compositions(n: u64, m: usize) -> Vec<Vec<u64>> {
    fn rec(rest: u64, slots: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=rest {
            prefix.push(c);
            rec(rest - c, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    rec(n, m, &mut Vec::with_capacity(m), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_value_per_half() {
        let spec = BinSpec::new(0.0, 1.0, 2).unwrap();
        let h = build_histogram(&[0.1, 0.9], spec).unwrap();
        assert_eq!(h.counts(), &[1, 1]);
    }

    #[test]
    fn empty_input_gives_zero_counts() {
        let spec = BinSpec::new(0.0, 1.0, 4).unwrap();
        let h = build_histogram(&[], spec).unwrap();
        assert_eq!(h.counts(), &[0, 0, 0, 0]);
        assert_eq!(h.total(), 0);
    }

    #[test]
    fn uniform_draws_concentrate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let values: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let h = build_histogram(&values, BinSpec::new(0.0, 1.0, 10).unwrap()).unwrap();
        // Binomial(1000, 0.1): sd = sqrt(90)
        let sd = 90f64.sqrt();
        for &c in h.counts() {
            assert!((c as f64 - 100.0).abs() <= 5.0 * sd, "count {c}");
        }
        assert_eq!(h.total(), 1000);
    }

    #[test]
    fn out_of_range_values_are_clamped() {
        let spec = BinSpec::new(0.0, 1.0, 4).unwrap();
        let h = build_histogram(&[-3.0, 0.0, 1.0, 7.5, 0.5], spec).unwrap();
        assert_eq!(h.counts(), &[2, 0, 1, 2]);
    }

    #[test]
    fn right_edge_is_closed() {
        let spec = BinSpec::new(0.0, 3.0, 3).unwrap();
        assert_eq!(spec.index_of(3.0), 2);
        assert_eq!(spec.index_of(2.0), 2);
        assert_eq!(spec.index_of(1.9999), 1);
    }

    #[test]
    fn non_finite_values_report_indices() {
        let spec = BinSpec::new(0.0, 1.0, 2).unwrap();
        let err = build_histogram(&[0.1, f64::NAN, 0.2, f64::INFINITY], spec).unwrap_err();
        match err {
            Error::NonFinite { indices } => assert_eq!(indices, vec![1, 3]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(BinSpec::new(1.0, 1.0, 3).is_err());
        assert!(BinSpec::new(2.0, 1.0, 3).is_err());
        assert!(BinSpec::new(0.0, 1.0, 0).is_err());
        assert!(BinSpec::new(f64::NAN, 1.0, 2).is_err());
    }

    #[test]
    fn constant_column_gets_unit_range() {
        let spec = BinSpec::from_data(&[4.0, 4.0, 4.0], 5).unwrap();
        assert_eq!((spec.lo(), spec.hi()), (4.0, 5.0));
    }

    #[test]
    fn composition_count_matches_stars_and_bars() {
        // C(n + m - 1, m - 1)
        assert_eq!(compositions(5, 3).len(), 21);
        assert_eq!(compositions(12, 4).len(), 455);
        assert!(compositions(4, 2).iter().all(|c| c.iter().sum::<u64>() == 4));
    }

    proptest::proptest! {
        #[test]
        fn binning_preserves_count(values in proptest::collection::vec(-10.0f64..10.0, 0..200), m in 1usize..40) {
            let spec = BinSpec::new(-5.0, 5.0, m).unwrap();
            let h = build_histogram(&values, spec).unwrap();
            proptest::prop_assert_eq!(h.total() as usize, values.len());
        }
    }
}
