//! Recursive two-class linear discriminant classifier.
//!
//! Sufficient statistics are maintained in one pass: per-class counts,
//! per-class means via the incremental mean update, and the pooled
//! within-class scatter via Welford accumulation. Every update is O(d^2)
//! and the statistics match a batch recomputation to floating precision.

use crate::classifiers::{LabeledSample, StreamingClassifier};
use crate::error::{EcddError, Result};

/// Ridge scale applied to the pooled covariance diagonal before inversion.
const RIDGE_SCALE: f64 = 1e-6;
/// Absolute ridge floor for the all-points-identical degenerate case.
const RIDGE_FLOOR: f64 = 1e-12;

/// Streaming linear discriminant analysis for labels {0, 1}.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lda {
    dim: usize,
    count: [u64; 2],
    mean: [Vec<f64>; 2],
    /// Pooled within-class scatter, row-major d x d.
    scatter: Vec<f64>,
}

impl Lda {
    pub fn new() -> Self {
        Lda::default()
    }

    pub fn class_count(&self, label: u8) -> u64 {
        self.count[usize::from(label & 1)]
    }

    pub fn class_mean(&self, label: u8) -> &[f64] {
        &self.mean[usize::from(label & 1)]
    }

    /// Pooled within-class scatter matrix (row-major), before covariance
    /// scaling.
    pub fn pooled_scatter(&self) -> &[f64] {
        &self.scatter
    }

    fn classes_seen(&self) -> usize {
        usize::from(self.count[0] > 0) + usize::from(self.count[1] > 0)
    }

    /// Predict, failing when no training data has been seen.
    pub fn try_predict(&self, features: &[f64]) -> Result<u8> {
        match self.classes_seen() {
            0 => Err(EcddError::Usage(
                "LDA prediction requires at least one training sample".into(),
            )),
            1 => Ok(u8::from(self.count[1] > 0)),
            _ => Ok(self.discriminate(features)),
        }
    }

    /// Linear discriminant rule with pooled covariance and estimated priors;
    /// ties break toward class 0.
    fn discriminate(&self, features: &[f64]) -> u8 {
        let d = self.dim;
        let n = self.count[0] + self.count[1];
        // Pooled covariance with the standard n - C divisor.
        let denom = (n.saturating_sub(2)).max(1) as f64;
        let mut cov: Vec<f64> = self.scatter.iter().map(|s| s / denom).collect();
        let trace: f64 = (0..d).map(|i| cov[i * d + i]).sum();
        let ridge = (RIDGE_SCALE * trace / d as f64).max(RIDGE_FLOOR);
        for i in 0..d {
            cov[i * d + i] += ridge;
        }
        let chol = match cholesky(&cov, d) {
            Some(c) => c,
            // Scatter so degenerate even the ridge cannot save it: fall back
            // to the prior-majority class.
            None => return u8::from(self.count[1] > self.count[0]),
        };
        let total = n as f64;
        let mut scores = [0.0f64; 2];
        for c in 0..2 {
            let mu = &self.mean[c];
            let a = chol_solve(&chol, d, mu);
            let xa: f64 = features.iter().zip(&a).map(|(x, y)| x * y).sum();
            let ma: f64 = mu.iter().zip(&a).map(|(x, y)| x * y).sum();
            let prior = self.count[c] as f64 / total;
            scores[c] = xa - 0.5 * ma + prior.ln();
        }
        u8::from(scores[1] > scores[0])
    }
}

impl StreamingClassifier for Lda {
    fn predict(&self, features: &[f64]) -> u8 {
        self.try_predict(features).unwrap_or(0)
    }

    fn update(&mut self, sample: &LabeledSample) -> Result<()> {
        if sample.label > 1 {
            return Err(EcddError::Input(format!(
                "label must be 0 or 1, got {}",
                sample.label
            )));
        }
        let x = &sample.features;
        if self.dim == 0 {
            if x.is_empty() {
                return Err(EcddError::Input("empty feature vector".into()));
            }
            self.dim = x.len();
            self.mean = [vec![0.0; self.dim], vec![0.0; self.dim]];
            self.scatter = vec![0.0; self.dim * self.dim];
        } else if x.len() != self.dim {
            return Err(EcddError::Input(format!(
                "feature dimension {} does not match stream dimension {}",
                x.len(),
                self.dim
            )));
        }
        let c = usize::from(sample.label);
        self.count[c] += 1;
        let n = self.count[c] as f64;
        let d = self.dim;
        let mean = &mut self.mean[c];
        // delta = x - mean_old; mean_new = mean_old + delta/n;
        // scatter += delta (x - mean_new)^T
        let mut delta = vec![0.0; d];
        for i in 0..d {
            delta[i] = x[i] - mean[i];
            mean[i] += delta[i] / n;
        }
        for i in 0..d {
            for j in 0..d {
                self.scatter[i * d + j] += delta[i] * (x[j] - mean[j]);
            }
        }
        Ok(())
    }

    fn reset(&mut self) {
        *self = Lda::new();
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix
/// (row-major); `None` if the matrix is not positive definite.
fn cholesky(m: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0f64; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = m[i * d + j];
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * d + i] = sum.sqrt();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    Some(l)
}

/// Solve `L L^T a = b` by forward and back substitution.
fn chol_solve(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0f64; d];
    for i in 0..d {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * d + k] * y[k];
        }
        y[i] = sum / l[i * d + i];
    }
    let mut a = vec![0.0f64; d];
    for i in (0..d).rev() {
        let mut sum = y[i];
        for k in (i + 1)..d {
            sum -= l[k * d + i] * a[k];
        }
        a[i] = sum / l[i * d + i];
    }
    a
}
