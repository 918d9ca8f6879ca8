use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance between universe elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    /// `|i - j|`, the natural choice for histogram bin indices.
    Line,
    /// 0 on the diagonal, 1 elsewhere.
    Discrete,
    /// Explicit symmetric matrix.
    Matrix(Vec<Vec<f64>>),
}

/// Finite ordered set of records `0..len` with a distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    len: usize,
    distance: Distance,
}

impl Universe {
    pub fn line(len: usize) -> Result<Self> {
        Self::new(len, Distance::Line)
    }

    pub fn discrete(len: usize) -> Result<Self> {
        Self::new(len, Distance::Discrete)
    }

    pub fn from_matrix(d: Vec<Vec<f64>>) -> Result<Self> {
        let len = d.len();
        if d.iter().any(|row| row.len() != len) {
            return Err(Error::param("distance matrix must be square"));
        }
        for i in 0..len {
            if d[i][i] != 0.0 {
                return Err(Error::param(format!("distance({i}, {i}) must be 0")));
            }
            for j in 0..len {
                if !(d[i][j].is_finite() && d[i][j] >= 0.0) {
                    return Err(Error::param(format!("distance({i}, {j}) must be finite and non-negative")));
                }
                if d[i][j] != d[j][i] {
                    return Err(Error::param(format!("distance({i}, {j}) is not symmetric")));
                }
            }
        }
        Self::new(len, Distance::Matrix(d))
    }

    fn new(len: usize, distance: Distance) -> Result<Self> {
        if len < 2 {
            return Err(Error::param("universe needs at least 2 elements"));
        }
        Ok(Self { len, distance })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        match &self.distance {
            Distance::Line => a.abs_diff(b) as f64,
            Distance::Discrete => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            Distance::Matrix(d) => d[a][b],
        }
    }

    pub(crate) fn check(&self, x: usize) -> Result<()> {
        if x < self.len {
            Ok(())
        } else {
            Err(Error::param(format!("record {x} is outside the universe of size {}", self.len)))
        }
    }
}
