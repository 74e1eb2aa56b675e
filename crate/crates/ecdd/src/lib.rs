//! Concept drift detection for streaming binary classification.
//!
//! The core of the crate is an adaptive Bernoulli EWMA chart that monitors a
//! classifier's misclassification stream and flags when the error rate rises
//! above its estimated in-control level. Every update is O(1) in time and
//! memory, so the detector can ride alongside any streaming classifier.
//!
//! Modules:
//!
//! - [`detector`] — the online change detector (EWMA estimator, running
//!   pre-change estimate, adaptive control limit, warning state).
//! - [`calibration`] — Monte Carlo estimation of in-control average run
//!   length, control-limit search, and polynomial lookup-table fitting.
//! - [`classifiers`] — reference streaming classifiers (recursive LDA and
//!   history-based KNN) behind a uniform predict/update/reset interface.
//! - [`streams`] — synthetic benchmark generators and CSV ingestion, all
//!   exposed as deterministic pull-based sample sources.
//! - [`harness`] — replicated prequential experiment runner with detection
//!   logs, sliding-window accuracy traces, and McNemar comparisons.
//! - [`presets`] — named benchmark configurations used by the CLI.
//!
//! # Example
//!
//! ```
//! use ecdd::calibration::CalibrationTable;
//! use ecdd::detector::{Detector, DetectorConfig};
//!
//! let table = CalibrationTable::builtin();
//! let config = DetectorConfig {
//!     lambda: 0.2,
//!     target_arl0: 400.0,
//!     min_observations: 0,
//!     ..DetectorConfig::default()
//! };
//! let mut detector: Detector<()> = Detector::new(config, &table).unwrap();
//! for &bit in &[0u8, 0, 1, 0, 1] {
//!     let status = detector.step(bit, None).unwrap();
//!     println!("t={} z={:.4} status={:?}", detector.state().t, detector.state().z, status);
//! }
//! ```

pub mod calibration;
pub mod classifiers;
pub mod detector;
pub mod error;
pub mod harness;
pub mod presets;
pub mod seed;
pub mod streams;

pub use error::{EcddError, Result};
