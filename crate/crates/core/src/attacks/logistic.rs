use serde::{Deserialize, Serialize};

use super::MiaSample;
use crate::error::{Error, Result};

/// Two-feature logistic regression over z-scored features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: [f64; 2],
    pub bias: f64,
    pub mean: [f64; 2],
    pub scale: [f64; 2],
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticModel {
    fn standardise(&self, x: [f64; 2]) -> [f64; 2] {
        [(x[0] - self.mean[0]) / self.scale[0], (x[1] - self.mean[1]) / self.scale[1]]
    }

    /// Linear score; monotone in the membership probability.
    pub fn score(&self, x: [f64; 2]) -> f64 {
        let z = self.standardise(x);
        self.weights[0] * z[0] + self.weights[1] * z[1] + self.bias
    }

    pub fn predict_proba(&self, x: [f64; 2]) -> f64 {
        sigmoid(self.score(x))
    }

    pub fn predict(&self, x: [f64; 2]) -> bool {
        self.predict_proba(x) >= 0.5
    }

    pub fn accuracy(&self, samples: &[MiaSample]) -> f64 {
        let hits = samples.iter().filter(|s| self.predict(s.features()) == s.member).count();
        hits as f64 / samples.len() as f64
    }
}

/// Full-batch gradient descent on the mean log-loss. Features are z-scored
/// with the training statistics first; a constant feature keeps scale 1.
pub fn fit_logistic(samples: &[MiaSample], iters: usize, lr: f64) -> Result<LogisticModel> {
    if samples.len() < 2 {
        return Err(Error::param("logistic fit needs at least 2 samples"));
    }
    let positives = samples.iter().filter(|s| s.member).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::param("logistic fit needs both labels present"));
    }
    if samples.iter().any(|s| !s.entropy.is_finite() || !s.total_count.is_finite()) {
        return Err(Error::param("features must be finite"));
    }
    let n = samples.len() as f64;
    let mut mean = [0.0; 2];
    for s in samples {
        let x = s.features();
        mean[0] += x[0] / n;
        mean[1] += x[1] / n;
    }
    let mut scale = [0.0; 2];
    for s in samples {
        let x = s.features();
        scale[0] += (x[0] - mean[0]).powi(2) / n;
        scale[1] += (x[1] - mean[1]).powi(2) / n;
    }
    let scale = scale.map(|v| if v > 1e-24 { v.sqrt() } else { 1.0 });

    let mut model = LogisticModel { weights: [0.0; 2], bias: 0.0, mean, scale };
    let data: Vec<([f64; 2], f64)> = samples
        .iter()
        .map(|s| (model.standardise(s.features()), if s.member { 1.0 } else { 0.0 }))
        .collect();
    for _ in 0..iters {
        let mut grad = [0.0; 3];
        for (z, y) in &data {
            let err = sigmoid(model.weights[0] * z[0] + model.weights[1] * z[1] + model.bias) - y;
            grad[0] += err * z[0];
            grad[1] += err * z[1];
            grad[2] += err;
        }
        model.weights[0] -= lr * grad[0] / n;
        model.weights[1] -= lr * grad[1] / n;
        model.bias -= lr * grad[2] / n;
    }
    Ok(model)
}
