//! Reference streaming base classifiers.
//!
//! Both classifiers sit behind [`StreamingClassifier`], the interface the
//! experiment harness drives: predict, learn from the revealed label, reset
//! after a detection, and optionally warm-start from a warning buffer.
//! Adaptivity comes entirely from detector-triggered resets; the classifiers
//! themselves never forget.

mod knn;
mod lda;

pub use knn::Knn;
pub use lda::Lda;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A feature vector with its binary class label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    /// 0 or 1.
    pub label: u8,
}

impl LabeledSample {
    pub fn new(features: Vec<f64>, label: u8) -> Self {
        debug_assert!(label <= 1, "labels are binary");
        LabeledSample { features, label }
    }
}

/// Uniform interface over streaming two-class classifiers.
pub trait StreamingClassifier {
    /// Predict the class of `features` without mutating any state.
    ///
    /// Cold-start rule: with no training data at all, predict class 0.
    fn predict(&self, features: &[f64]) -> u8;

    /// Learn from one labeled sample. The feature dimension is fixed by the
    /// first sample seen since the last reset.
    fn update(&mut self, sample: &LabeledSample) -> Result<()>;

    /// Discard everything learned; equivalent to a newly built classifier.
    fn reset(&mut self);

    /// Replay a buffer of retained samples in order. `reset` followed by
    /// `warm_start(B)` is identical to `reset` followed by updating on each
    /// element of `B`.
    fn warm_start(&mut self, samples: &[LabeledSample]) -> Result<()> {
        for sample in samples {
            self.update(sample)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warm_start_equals_folded_updates() {
        let samples: Vec<LabeledSample> = (0..20)
            .map(|i| {
                let x = f64::from(i);
                LabeledSample::new(vec![x.sin(), x.cos() * 2.0], u8::from(i % 3 == 0))
            })
            .collect();

        let mut warm = Lda::new();
        warm.warm_start(&samples).unwrap();
        let mut folded = Lda::new();
        for s in &samples {
            folded.update(s).unwrap();
        }
        for probe in [[0.0, 0.0], [1.0, -1.0], [-0.4, 2.0]] {
            assert_eq!(warm.predict(&probe), folded.predict(&probe));
        }

        let mut warm_knn = Knn::new(3);
        warm_knn.warm_start(&samples).unwrap();
        let mut folded_knn = Knn::new(3);
        for s in &samples {
            folded_knn.update(s).unwrap();
        }
        for probe in [[0.1, 0.9], [2.0, -0.5]] {
            assert_eq!(warm_knn.predict(&probe), folded_knn.predict(&probe));
        }
    }
}
