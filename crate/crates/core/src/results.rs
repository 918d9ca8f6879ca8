//! Tabular experiment records and their CSV/JSON serialisation.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of an experiment table: parameters in, metrics out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub params: IndexMap<String, String>,
    pub metrics: IndexMap<String, f64>,
    pub seed: u64,
}

impl ExperimentResult {
    pub fn new(experiment: impl Into<String>, seed: u64) -> Self {
        Self { experiment: experiment.into(), params: IndexMap::new(), metrics: IndexMap::new(), seed }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn get_metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn get_param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn columns(&self) -> (Vec<&str>, Vec<&str>) {
        (
            self.params.keys().map(String::as_str).collect(),
            self.metrics.keys().map(String::as_str).collect(),
        )
    }
}

/// Column layout shared by every row of a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSchema {
    pub param_columns: Vec<String>,
    pub metric_columns: Vec<String>,
}

impl TableSchema {
    pub fn of(rows: &[ExperimentResult]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Ok(Self { param_columns: vec![], metric_columns: vec![] });
        };
        let cols = first.columns();
        if let Some(bad) = rows.iter().find(|r| r.columns() != cols) {
            return Err(Error::Assertion(format!(
                "row columns differ within one table: {:?} vs {:?}",
                cols,
                bad.columns()
            )));
        }
        Ok(Self {
            param_columns: cols.0.into_iter().map(String::from).collect(),
            metric_columns: cols.1.into_iter().map(String::from).collect(),
        })
    }
}

/// Writes rows as CSV: `experiment, seed, <params...>, <metrics...>`. Floats use
/// the shortest representation that parses back to the same value.
pub fn write_csv(path: &Path, rows: &[ExperimentResult]) -> Result<TableSchema> {
    let schema = TableSchema::of(rows)?;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["experiment".to_string(), "seed".to_string()];
    header.extend(schema.param_columns.iter().cloned());
    header.extend(schema.metric_columns.iter().cloned());
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.experiment.clone(), r.seed.to_string()];
        rec.extend(r.params.values().cloned());
        rec.extend(r.metrics.values().map(|v| format!("{v}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(schema)
}

/// Reads a table written by [`write_csv`].
pub fn read_csv(path: &Path, schema: &TableSchema) -> Result<Vec<ExperimentResult>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let np = schema.param_columns.len();
    let nm = schema.metric_columns.len();
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 + np + nm {
            return Err(Error::Data(format!("row {} has {} fields, expected {}", line + 2, rec.len(), 2 + np + nm)));
        }
        let seed = rec[1]
            .parse()
            .map_err(|_| Error::Data(format!("row {}: bad seed {:?}", line + 2, &rec[1])))?;
        let mut row = ExperimentResult::new(&rec[0], seed);
        for (i, key) in schema.param_columns.iter().enumerate() {
            row.params.insert(key.clone(), rec[2 + i].to_string());
        }
        for (i, key) in schema.metric_columns.iter().enumerate() {
            let raw = &rec[2 + np + i];
            let v: f64 = raw
                .parse()
                .map_err(|_| Error::Data(format!("row {}: bad metric {key}={raw:?}", line + 2)))?;
            row.metrics.insert(key.clone(), v);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_round_trip(vals in prop::collection::vec(any::<f64>(), 1..20), seed in any::<u64>()) {
            let rows: Vec<_> = vals
                .iter()
                .enumerate()
                .map(|(i, &v)| ExperimentResult::new("t", seed).param("i", i).param("name", "a,b").metric("v", v))
                .collect();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("r.csv");
            let schema = write_csv(&path, &rows).unwrap();
            let back = read_csv(&path, &schema).unwrap();
            prop_assert_eq!(back.len(), rows.len());
            for (a, b) in back.iter().zip(&rows) {
                prop_assert_eq!(&a.params, &b.params);
                let (x, y) = (a.metrics["v"], b.metrics["v"]);
                prop_assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
            }
        }
    }

    #[test]
    fn mixed_columns_rejected() {
        let rows = vec![ExperimentResult::new("t", 0).metric("a", 1.0), ExperimentResult::new("t", 0).metric("b", 1.0)];
        assert!(TableSchema::of(&rows).is_err());
    }
}
