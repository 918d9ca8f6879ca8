use std::path::PathBuf;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{build_histogram, BinSpec, Histogram};
use crate::mechanisms::rng_from_seed;

/// One numeric column of a CSV file with a header row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSource {
    /// Label used in result rows; defaults to the file stem.
    #[serde(default)]
    pub name: Option<String>,
    pub path: PathBuf,
    pub column: String,
    /// Only the first `cap` data rows are read.
    #[serde(default)]
    pub cap: Option<usize>,
}

impl DatasetSource {
    pub fn new(path: impl Into<PathBuf>, column: impl Into<String>) -> Self {
        Self { name: None, path: path.into(), column: column.into(), cap: None }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        })
    }
}

/// Parses the named column as reals. Blank cells are skipped with a single
/// counted warning; anything else that fails to parse is an error carrying its
/// line number (the header is line 1).
pub fn load_column(src: &DatasetSource) -> Result<Vec<f64>> {
    if src.cap == Some(0) {
        return Err(Error::param("cap must be at least 1"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(&src.path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", src.path.display())))?;
    let headers = reader.headers()?.clone();
    let col = headers
        .iter()
        .position(|h| h.trim() == src.column)
        .ok_or_else(|| Error::Data(format!("column {:?} not found in {}", src.column, src.path.display())))?;

    let mut values = Vec::new();
    let mut blanks = 0usize;
    for (i, record) in reader.records().enumerate() {
        if src.cap.is_some_and(|cap| i >= cap) {
            break;
        }
        let record = record?;
        let line = i + 2;
        let cell = record.get(col).unwrap_or("").trim();
        if cell.is_empty() {
            blanks += 1;
            continue;
        }
        let v: f64 = cell
            .parse()
            .map_err(|_| Error::Data(format!("{}:{line}: cannot parse {cell:?} as a number", src.path.display())))?;
        if !v.is_finite() {
            return Err(Error::Data(format!("{}:{line}: non-finite value {cell:?}", src.path.display())));
        }
        values.push(v);
    }
    if blanks > 0 {
        warn!("skipped {blanks} blank cell(s) in column {:?} of {}", src.column, src.path.display());
    }
    if values.is_empty() {
        return Err(Error::Data(format!("column {:?} of {} has no values", src.column, src.path.display())));
    }
    Ok(values)
}

/// `n` values drawn uniformly from `[0, 1)`. Binned with [`fixture_spec`] for
/// any `m`, they form a uniform multinomial histogram with `n` records over `m`
/// bins.
pub fn uniform_fixture(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// `[0, 1]` split into `m` equal bins.
pub fn fixture_spec(m: usize) -> Result<BinSpec> {
    BinSpec::new(0.0, 1.0, m)
}

/// Histogram of [`uniform_fixture`] over `m` bins.
pub fn multinomial_histogram(n: usize, m: usize, seed: u64) -> Result<Histogram> {
    build_histogram(&uniform_fixture(n, seed), fixture_spec(m)?)
}

/// Records for the pass-rate experiment: `n` draws of a rounded, clamped
/// normal over `0..len`, centred with spread `len / 6`.
pub fn clustered_records(n: usize, len: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    let centre = (len as f64 - 1.0) / 2.0;
    let spread = len as f64 / 6.0;
    (0..n)
        .map(|_| {
            let z = crate::mechanisms::gaussian_noise(1.0, &mut rng);
            (centre + spread * z).round().clamp(0.0, len as f64 - 1.0) as usize
        })
        .collect()
}
