//! Online EWMA change detector over a binary error stream.
//!
//! The detector watches the misclassification bits `X_t in {0,1}` of a
//! streaming classifier and maintains two estimators:
//!
//! - `Z_t = (1-lambda) Z_{t-1} + lambda X_t` with `Z_0 = 0`, a recency-
//!   weighted estimate that tracks the *current* error rate;
//! - `p_hat_t`, the plain running mean of all bits since the last reset,
//!   which tracks the *pre-change* error rate.
//!
//! Drift is flagged when `Z_t > p_hat_t + L_t * sigma_hat_{Z_t}`, where the
//! control limit `L_t` comes from a calibration polynomial evaluated at
//! `p_hat_t` so the false-positive rate stays at the configured ARL0 as the
//! error-rate estimate evolves. A lower warning threshold
//! `W_t = warning_fraction * L_t` starts buffering caller-supplied payloads
//! (typically labeled samples) so a classifier can be warm-started after a
//! detection instead of relearning from nothing.
//!
//! Every step is O(1) in time and memory; only the warning buffer holds
//! caller data, and only while the warning condition persists.

use std::collections::VecDeque;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::calibration::{CalibrationEntry, CalibrationTable};
use crate::error::{EcddError, Result};

/// Drift flags are suppressed for this many initial observations unless the
/// caller overrides: with only a handful of bits the running mean is a
/// degenerate rational and thresholds are meaningless.
pub const DEFAULT_MIN_OBSERVATIONS: u64 = 30;

/// Suggested bound when a caller opts into capping the warning buffer.
pub const SUGGESTED_WARNING_BUFFER_CAP: usize = 32;

/// Detector configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// EWMA weight in (0,1); 0.2 is a robust default.
    pub lambda: f64,
    /// Target mean observations between false positives; must have a
    /// calibration entry for `lambda`.
    pub target_arl0: f64,
    /// Warning threshold as a fraction of the control limit, in (0,1].
    pub warning_fraction: f64,
    /// Burn-in during which Drift is suppressed (Warning still fires).
    pub min_observations: u64,
    /// Optional cap on buffered payloads; the most recent are kept.
    pub warning_buffer_cap: Option<usize>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            lambda: 0.2,
            target_arl0: 400.0,
            warning_fraction: 0.5,
            min_observations: DEFAULT_MIN_OBSERVATIONS,
            warning_buffer_cap: None,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(EcddError::Config(format!(
                "lambda {} outside (0,1)",
                self.lambda
            )));
        }
        if !(self.target_arl0 > 1.0) || !self.target_arl0.is_finite() {
            return Err(EcddError::Config(format!(
                "target_arl0 {} must be finite and exceed 1",
                self.target_arl0
            )));
        }
        if !(self.warning_fraction > 0.0 && self.warning_fraction <= 1.0) {
            return Err(EcddError::Config(format!(
                "warning_fraction {} outside (0,1]",
                self.warning_fraction
            )));
        }
        if self.warning_buffer_cap == Some(0) {
            return Err(EcddError::Config("warning_buffer_cap must be positive".into()));
        }
        Ok(())
    }
}

/// Chart status after an observation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorStatus {
    InControl,
    Warning,
    Drift,
}

impl DetectorStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DetectorStatus::InControl => "in-control",
            DetectorStatus::Warning => "warning",
            DetectorStatus::Drift => "drift",
        }
    }
}

/// Full detector state; constant-size apart from the warning buffer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorState<P> {
    /// Observations since the last reset.
    pub t: u64,
    /// EWMA estimator `Z_t`; stays in [0,1].
    pub z: f64,
    /// Running mean of all error bits since the last reset (exactly; it is
    /// computed as an integer count over `t`).
    pub p_hat: f64,
    /// `sqrt(p_hat (1 - p_hat))`.
    pub sigma_x: f64,
    /// `sqrt((lambda/(2-lambda)) (1-(1-lambda)^{2t})) * sigma_x`.
    pub sigma_z: f64,
    pub status: DetectorStatus,
    /// Payloads retained while the warning condition holds; drained by reset.
    pub warning_buffer: VecDeque<P>,
    error_count: u64,
    /// `(1-lambda)^{2t}`, maintained incrementally.
    decay: f64,
}

impl<P> DetectorState<P> {
    fn fresh() -> Self {
        DetectorState {
            t: 0,
            z: 0.0,
            p_hat: 0.0,
            sigma_x: 0.0,
            sigma_z: 0.0,
            status: DetectorStatus::InControl,
            warning_buffer: VecDeque::new(),
            error_count: 0,
            decay: 1.0,
        }
    }
}

/// Standard deviation of the EWMA estimator after `t` observations of an iid
/// Bernoulli(`p`) stream:
/// `sqrt(p (1-p) (lambda/(2-lambda)) (1 - (1-lambda)^{2t}))`.
///
/// Nondecreasing in `t` with limit `sqrt(p (1-p) lambda/(2-lambda))`.
pub fn ewma_sigma(p: f64, lambda: f64, t: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EcddError::Input(format!("p {p} outside [0,1]")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(EcddError::Input(format!("lambda {lambda} outside (0,1)")));
    }
    if t == 0 {
        return Err(EcddError::Input("t must be positive".into()));
    }
    let ratio = lambda / (2.0 - lambda);
    // (1-lambda)^{2t} underflows harmlessly to 0 for large t.
    let transient = 1.0 - (1.0 - lambda).powi(2).powf(t as f64);
    Ok((p * (1.0 - p) * ratio * transient).sqrt())
}

/// The ECDD online detector. Generic over the payload type buffered while in
/// warning; use `()` (or pass `None`) when retraining data is not needed.
///
/// A detector is a single-stream sequential object: it can move between
/// threads, and independent detectors run in parallel without coordination,
/// but one instance must be driven from one stream at a time.
#[derive(Clone, Debug)]
pub struct Detector<P> {
    config: DetectorConfig,
    entry: CalibrationEntry,
    state: DetectorState<P>,
}

/// Serialized checkpoint: configuration plus the full state.
#[derive(Deserialize)]
struct Snapshot<P> {
    version: u32,
    config: DetectorConfig,
    state: DetectorState<P>,
}

#[derive(Serialize)]
struct SnapshotRef<'a, P> {
    version: u32,
    config: &'a DetectorConfig,
    state: &'a DetectorState<P>,
}

const SNAPSHOT_VERSION: u32 = 1;

impl<P> Detector<P> {
    /// Build a detector, resolving the `(lambda, target_arl0)` calibration
    /// entry up front so each step stays O(1).
    pub fn new(config: DetectorConfig, table: &CalibrationTable) -> Result<Self> {
        config.validate()?;
        let entry = table.require(config.lambda, config.target_arl0)?.clone();
        Ok(Detector {
            config,
            entry,
            state: DetectorState::fresh(),
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn state(&self) -> &DetectorState<P> {
        &self.state
    }

    /// Control limit the next comparison would use, i.e. the calibration
    /// polynomial at the current (clamped) `p_hat`.
    pub fn limit(&self) -> f64 {
        self.entry.eval_clamped(self.state.p_hat)
    }

    /// Advance the chart by one error bit.
    ///
    /// Updates `p_hat`, the sigma estimates, the control limit, and `Z_t`,
    /// then classifies the observation: Drift if `Z_t` strictly exceeds
    /// `p_hat + L_t sigma_Z` (and burn-in has passed), else Warning if it
    /// exceeds `p_hat + W_t sigma_Z`, else InControl. While the warning
    /// condition holds the payload is buffered; returning to InControl
    /// discards the buffer.
    ///
    /// A detector that has flagged Drift must be [`Detector::reset`] before
    /// further use.
    pub fn step(&mut self, error_bit: u8, payload: Option<P>) -> Result<DetectorStatus> {
        if self.state.status == DetectorStatus::Drift {
            return Err(EcddError::Usage(
                "detector already flagged drift; reset before stepping again".into(),
            ));
        }
        if error_bit > 1 {
            return Err(EcddError::Input(format!(
                "error bit must be 0 or 1, got {error_bit}"
            )));
        }
        let lambda = self.config.lambda;
        let x = f64::from(error_bit);
        let s = &mut self.state;

        s.t += 1;
        s.error_count += u64::from(error_bit);
        s.p_hat = s.error_count as f64 / s.t as f64;
        s.decay *= (1.0 - lambda) * (1.0 - lambda);
        s.sigma_x = (s.p_hat * (1.0 - s.p_hat)).sqrt();
        s.sigma_z = (lambda / (2.0 - lambda) * (1.0 - s.decay)).sqrt() * s.sigma_x;

        let limit = self.entry.eval_clamped(s.p_hat);
        let warn = self.config.warning_fraction * limit;
        s.z = (1.0 - lambda) * s.z + lambda * x;

        s.status = if s.z > s.p_hat + limit * s.sigma_z && s.t >= self.config.min_observations {
            DetectorStatus::Drift
        } else if s.z > s.p_hat + warn * s.sigma_z {
            DetectorStatus::Warning
        } else {
            DetectorStatus::InControl
        };

        if s.status == DetectorStatus::InControl {
            s.warning_buffer.clear();
        } else if let Some(p) = payload {
            if let Some(cap) = self.config.warning_buffer_cap {
                while s.warning_buffer.len() >= cap {
                    s.warning_buffer.pop_front();
                }
            }
            s.warning_buffer.push_back(p);
        }
        Ok(s.status)
    }

    /// Return to the freshly constructed state and hand the warning buffer
    /// to the caller (for classifier warm-starts).
    pub fn reset(&mut self) -> Vec<P> {
        let buffer = std::mem::take(&mut self.state.warning_buffer);
        self.state = DetectorState::fresh();
        buffer.into()
    }
}

impl<P: Serialize> Detector<P> {
    /// Serialize config and state to a JSON checkpoint.
    pub fn snapshot_json(&self) -> String {
        serde_json::to_string_pretty(&SnapshotRef {
            version: SNAPSHOT_VERSION,
            config: &self.config,
            state: &self.state,
        })
        .expect("detector state serializes")
    }
}

impl<P: DeserializeOwned> Detector<P> {
    /// Rebuild a detector from a JSON checkpoint, resolving its calibration
    /// entry from `table`.
    pub fn restore_json(text: &str, table: &CalibrationTable) -> Result<Self> {
        let snap: Snapshot<P> =
            serde_json::from_str(text).map_err(|e| EcddError::Parse(format!("snapshot: {e}")))?;
        if snap.version != SNAPSHOT_VERSION {
            return Err(EcddError::Parse(format!(
                "unsupported snapshot version {}",
                snap.version
            )));
        }
        snap.config.validate()?;
        let entry = table
            .require(snap.config.lambda, snap.config.target_arl0)?
            .clone();
        Ok(Detector {
            config: snap.config,
            entry,
            state: snap.state,
        })
    }
}
