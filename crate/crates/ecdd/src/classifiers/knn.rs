//! History-based K-nearest-neighbours classifier.
//!
//! Deliberately non-recursive: each observation is classified against all
//! previously stored samples (growing memory between resets), matching the
//! usual prequential benchmark setup for KNN.

use std::collections::VecDeque;

use crate::classifiers::{LabeledSample, StreamingClassifier};
use crate::error::{EcddError, Result};

/// KNN over the retained history, majority vote among the `k` nearest by
/// Euclidean distance.
#[derive(Clone, Debug, PartialEq)]
pub struct Knn {
    k: usize,
    cap: Option<usize>,
    history: VecDeque<LabeledSample>,
}

impl Knn {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "k must be at least 1");
        Knn {
            k,
            cap: None,
            history: VecDeque::new(),
        }
    }

    /// Bound the retained history (off by default); the oldest samples are
    /// evicted first.
    pub fn with_cap(k: usize, cap: usize) -> Self {
        assert!(cap >= 1, "cap must be at least 1");
        Knn {
            k,
            cap: Some(cap),
            history: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    /// Predict, failing on an empty history. Uses all available samples when
    /// fewer than `k` are stored; distance ties break toward the earliest
    /// stored neighbour, and a split vote falls back to the nearest
    /// neighbour's label.
    pub fn try_predict(&self, features: &[f64]) -> Result<u8> {
        if self.history.is_empty() {
            return Err(EcddError::Usage(
                "KNN prediction requires a non-empty history".into(),
            ));
        }
        // (squared distance, insertion index, label), kept sorted ascending.
        let mut best: Vec<(f64, usize, u8)> = Vec::with_capacity(self.k + 1);
        for (idx, s) in self.history.iter().enumerate() {
            let d2: f64 = s
                .features
                .iter()
                .zip(features)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let key = (d2, idx);
            let pos = best.partition_point(|&(bd, bi, _)| (bd, bi) < key);
            if pos < self.k {
                best.insert(pos, (d2, idx, s.label));
                best.truncate(self.k);
            }
        }
        let ones: usize = best.iter().map(|&(_, _, l)| usize::from(l)).sum();
        let zeros = best.len() - ones;
        Ok(match ones.cmp(&zeros) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => best[0].2,
        })
    }
}

impl StreamingClassifier for Knn {
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
        if let Some(first) = self.history.front() {
            if first.features.len() != sample.features.len() {
                return Err(EcddError::Input(format!(
                    "feature dimension {} does not match stream dimension {}",
                    sample.features.len(),
                    first.features.len()
                )));
            }
        } else if sample.features.is_empty() {
            return Err(EcddError::Input("empty feature vector".into()));
        }
        if let Some(cap) = self.cap {
            while self.history.len() >= cap {
                self.history.pop_front();
            }
        }
        self.history.push_back(sample.clone());
        Ok(())
    }

    fn reset(&mut self) {
        self.history.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(features: &[f64], label: u8) -> LabeledSample {
        LabeledSample::new(features.to_vec(), label)
    }

    #[test]
    fn majority_of_three_wins() {
        let mut knn = Knn::new(3);
        knn.update(&sample(&[0.0, 0.0], 0)).unwrap();
        knn.update(&sample(&[0.1, 0.0], 0)).unwrap();
        knn.update(&sample(&[5.0, 5.0], 1)).unwrap();
        assert_eq!(knn.predict(&[0.0, 0.0]), 0);
    }

    #[test]
    fn single_stored_point_decides() {
        let mut knn = Knn::new(3);
        knn.update(&sample(&[2.0, 2.0], 1)).unwrap();
        assert_eq!(knn.predict(&[-10.0, 4.0]), 1);
    }

    #[test]
    fn empty_history_is_a_usage_error() {
        let knn = Knn::new(3);
        assert!(matches!(
            knn.try_predict(&[0.0, 0.0]),
            Err(EcddError::Usage(_))
        ));
        assert_eq!(knn.predict(&[0.0, 0.0]), 0);
    }

    #[test]
    fn distance_ties_prefer_the_earliest_neighbour() {
        let mut knn = Knn::new(1);
        knn.update(&sample(&[1.0, 0.0], 1)).unwrap();
        knn.update(&sample(&[-1.0, 0.0], 0)).unwrap();
        // Query equidistant from both; the first-stored sample wins.
        assert_eq!(knn.predict(&[0.0, 0.0]), 1);
    }

    #[test]
    fn split_vote_falls_back_to_the_nearest_label() {
        let mut knn = Knn::new(3);
        // History of two with opposite labels: k truncates to 2, vote splits.
        knn.update(&sample(&[10.0, 0.0], 1)).unwrap();
        knn.update(&sample(&[0.1, 0.0], 0)).unwrap();
        assert_eq!(knn.predict(&[0.0, 0.0]), 0);
    }

    #[test]
    fn cap_evicts_the_oldest_samples() {
        let mut knn = Knn::with_cap(1, 2);
        knn.update(&sample(&[0.0], 0)).unwrap();
        knn.update(&sample(&[1.0], 1)).unwrap();
        knn.update(&sample(&[2.0], 1)).unwrap();
        assert_eq!(knn.len(), 2);
        // The (0.0, label 0) sample is gone.
        assert_eq!(knn.predict(&[0.0]), 1);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut knn = Knn::new(3);
        knn.update(&sample(&[0.0, 0.0], 0)).unwrap();
        assert!(knn.update(&sample(&[0.0], 0)).is_err());
    }

    #[test]
    fn reset_clears_history() {
        let mut knn = Knn::new(3);
        knn.update(&sample(&[0.0, 0.0], 0)).unwrap();
        knn.reset();
        assert!(knn.is_empty());
        assert_eq!(knn, Knn::new(3));
    }

    #[test]
    fn prediction_is_pure() {
        let mut knn = Knn::new(3);
        for i in 0..10 {
            knn.update(&sample(&[f64::from(i), f64::from(i % 4)], u8::from(i % 2 == 0)))
                .unwrap();
        }
        let before = knn.clone();
        let first = knn.predict(&[3.0, 1.0]);
        for _ in 0..5 {
            assert_eq!(knn.predict(&[3.0, 1.0]), first);
        }
        assert_eq!(knn, before);
    }
}
