//! Replicated prequential experiment runner.
//!
//! Each observation is predicted first, then its true label is revealed: the
//! error bit feeds the detector, the sample updates the classifier, and a
//! drift flag resets both (warm-starting the classifier from the drained
//! warning buffer in the `EcddWt` variant). Accuracy accumulates over every
//! prediction, cold starts included.
//!
//! Replications are independent: replication `i` streams with seed
//! `seed::derive(base_seed, i)` and runs on the rayon pool, with results
//! collected and reduced in replication order so reports are reproducible
//! bit for bit regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationTable;
use crate::classifiers::{Knn, Lda, StreamingClassifier};
use crate::detector::{Detector, DetectorConfig, DetectorStatus};
use crate::error::{EcddError, Result};
use crate::seed;
use crate::streams::{open_stream, StreamSpec};

/// Which base classifier an experiment drives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClassifierKind {
    Lda,
    Knn { k: usize },
}

impl ClassifierKind {
    fn build(&self) -> Box<dyn StreamingClassifier> {
        match self {
            ClassifierKind::Lda => Box::new(Lda::new()),
            ClassifierKind::Knn { k } => Box::new(Knn::new(*k)),
        }
    }
}

/// Drift handling: none, reset-on-drift, or reset with warm-start retraining
/// from the warning buffer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DetectorKind {
    None,
    Ecdd(DetectorConfig),
    EcddWt(DetectorConfig),
}

/// A replicated experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Stream template; each replication reseeds it deterministically.
    pub stream: StreamSpec,
    pub classifier: ClassifierKind,
    pub detector: DetectorKind,
    pub replications: u64,
    pub base_seed: u64,
}

/// Aggregated results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    /// Mean of the per-replication accuracies.
    pub mean_accuracy: f64,
    /// Standard deviation of the per-replication accuracies (the spread
    /// across streams, not the standard error of the mean).
    pub std_error: f64,
    pub per_replication_accuracy: Vec<f64>,
    /// `(replication, stream time)` of every drift flag.
    pub detections: Vec<(u64, u64)>,
    /// Forward sliding-window accuracy trace of replication 0, when requested.
    pub window_trace: Option<Vec<(u64, f64)>>,
    /// Root seed; replication `i` streamed with `seed::derive(base_seed, i)`.
    pub base_seed: u64,
}

struct SingleRun {
    errors: u64,
    observations: u64,
    detections: Vec<u64>,
    error_bits: Option<Vec<u8>>,
}

fn run_single(
    stream_spec: &StreamSpec,
    classifier_kind: &ClassifierKind,
    detector_kind: &DetectorKind,
    table: &CalibrationTable,
    keep_bits: bool,
) -> Result<SingleRun> {
    let mut source = open_stream(stream_spec)?;
    let mut classifier = classifier_kind.build();
    let (mut detector, warm_start) = match detector_kind {
        DetectorKind::None => (None, false),
        DetectorKind::Ecdd(cfg) => (Some(Detector::new(cfg.clone(), table)?), false),
        DetectorKind::EcddWt(cfg) => (Some(Detector::new(cfg.clone(), table)?), true),
    };

    let mut errors = 0u64;
    let mut observations = 0u64;
    let mut detections = Vec::new();
    let mut error_bits = if keep_bits { Some(Vec::new()) } else { None };

    while let Some(sample) = source.next_sample()? {
        observations += 1;
        let predicted = classifier.predict(&sample.features);
        let bit = u8::from(predicted != sample.label);
        errors += u64::from(bit);
        if let Some(bits) = error_bits.as_mut() {
            bits.push(bit);
        }
        classifier.update(&sample)?;
        if let Some(det) = detector.as_mut() {
            let payload = warm_start.then(|| sample.clone());
            if det.step(bit, payload)? == DetectorStatus::Drift {
                detections.push(observations);
                let buffer = det.reset();
                classifier.reset();
                if warm_start {
                    classifier.warm_start(&buffer)?;
                }
            }
        }
    }
    Ok(SingleRun {
        errors,
        observations,
        detections,
        error_bits,
    })
}

/// Run the experiment, optionally collecting a sliding-window accuracy trace
/// (window `trace_window`) from replication 0.
pub fn run_experiment(
    spec: &ExperimentSpec,
    table: &CalibrationTable,
    trace_window: Option<usize>,
) -> Result<ExperimentReport> {
    if spec.replications < 1 {
        return Err(EcddError::Config("replications must be at least 1".into()));
    }
    spec.stream.validate()?;
    if let DetectorKind::Ecdd(cfg) | DetectorKind::EcddWt(cfg) = &spec.detector {
        cfg.validate()?;
        table.require(cfg.lambda, cfg.target_arl0)?;
    }

    let runs: Vec<SingleRun> = (0..spec.replications)
        .into_par_iter()
        .map(|rep| {
            let stream = StreamSpec {
                seed: seed::derive(spec.base_seed, rep),
                ..spec.stream.clone()
            };
            run_single(
                &stream,
                &spec.classifier,
                &spec.detector,
                table,
                trace_window.is_some() && rep == 0,
            )
        })
        .collect::<Result<Vec<SingleRun>>>()?;

    let mut per_replication_accuracy = Vec::with_capacity(runs.len());
    let mut detections = Vec::new();
    let mut window_trace = None;
    for (rep, run) in runs.iter().enumerate() {
        if run.observations == 0 {
            return Err(EcddError::Input("stream produced no samples".into()));
        }
        per_replication_accuracy.push(1.0 - run.errors as f64 / run.observations as f64);
        detections.extend(run.detections.iter().map(|&t| (rep as u64, t)));
        if let (Some(w), Some(bits)) = (trace_window, run.error_bits.as_ref()) {
            window_trace = Some(window_accuracy(bits, w)?);
        }
    }
    let n = per_replication_accuracy.len() as f64;
    let mean_accuracy = per_replication_accuracy.iter().sum::<f64>() / n;
    let std_error = if runs.len() > 1 {
        let ss: f64 = per_replication_accuracy
            .iter()
            .map(|a| (a - mean_accuracy).powi(2))
            .sum();
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ExperimentReport {
        mean_accuracy,
        std_error,
        per_replication_accuracy,
        detections,
        window_trace,
        base_seed: spec.base_seed,
    })
}

/// McNemar's chi-squared statistic with continuity correction over the
/// discordant counts `b` (A right, B wrong) and `c` (A wrong, B right);
/// 0 when there are no discordant pairs.
pub fn mcnemar(b: u64, c: u64) -> f64 {
    if b + c == 0 {
        return 0.0;
    }
    let diff = (b as f64 - c as f64).abs() - 1.0;
    diff * diff / (b + c) as f64
}

/// Paired comparison of two configurations over identical streams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    /// Observations where A was correct and B wrong.
    pub b: u64,
    /// Observations where A was wrong and B correct.
    pub c: u64,
    /// McNemar chi-squared statistic with continuity correction.
    pub statistic: f64,
    pub mean_accuracy_a: f64,
    pub mean_accuracy_b: f64,
}

/// Run two experiment arms on the same streams (identical stream template,
/// base seed and replication count) and accumulate their discordant counts.
pub fn run_paired(
    spec_a: &ExperimentSpec,
    spec_b: &ExperimentSpec,
    table: &CalibrationTable,
) -> Result<PairedComparison> {
    if spec_a.stream != spec_b.stream
        || spec_a.replications != spec_b.replications
        || spec_a.base_seed != spec_b.base_seed
    {
        return Err(EcddError::Config(
            "paired comparison requires identical streams, seeds and replication counts".into(),
        ));
    }
    let outcomes: Vec<(u64, u64, u64, u64, u64)> = (0..spec_a.replications)
        .into_par_iter()
        .map(|rep| {
            let stream = StreamSpec {
                seed: seed::derive(spec_a.base_seed, rep),
                ..spec_a.stream.clone()
            };
            let run_a = run_single(&stream, &spec_a.classifier, &spec_a.detector, table, true)?;
            let run_b = run_single(&stream, &spec_b.classifier, &spec_b.detector, table, true)?;
            let bits_a = run_a.error_bits.expect("bits requested");
            let bits_b = run_b.error_bits.expect("bits requested");
            let mut b = 0u64;
            let mut c = 0u64;
            for (&ea, &eb) in bits_a.iter().zip(&bits_b) {
                match (ea, eb) {
                    (0, 1) => b += 1,
                    (1, 0) => c += 1,
                    _ => {}
                }
            }
            Ok((b, c, run_a.errors, run_b.errors, run_a.observations))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b = 0u64;
    let mut c = 0u64;
    let mut errors_a = 0u64;
    let mut errors_b = 0u64;
    let mut total = 0u64;
    for &(rb, rc, ea, eb, n) in &outcomes {
        b += rb;
        c += rc;
        errors_a += ea;
        errors_b += eb;
        total += n;
    }
    Ok(PairedComparison {
        b,
        c,
        statistic: mcnemar(b, c),
        mean_accuracy_a: 1.0 - errors_a as f64 / total as f64,
        mean_accuracy_b: 1.0 - errors_b as f64 / total as f64,
    })
}

/// Forward sliding-window accuracy: entry `t` (1-based) is the mean
/// correctness over observations `t ..= t+w-1`.
pub fn window_accuracy(errors: &[u8], w: usize) -> Result<Vec<(u64, f64)>> {
    if w == 0 {
        return Err(EcddError::Input("window must be positive".into()));
    }
    if w > errors.len() {
        return Err(EcddError::Input(format!(
            "window {w} exceeds the stream length {}",
            errors.len()
        )));
    }
    let mut correct_in_window: u64 = errors[..w].iter().map(|&b| u64::from(b == 0)).sum();
    let mut out = Vec::with_capacity(errors.len() - w + 1);
    out.push((1, correct_in_window as f64 / w as f64));
    for start in 1..=(errors.len() - w) {
        correct_in_window += u64::from(errors[start + w - 1] == 0);
        correct_in_window -= u64::from(errors[start - 1] == 0);
        out.push(((start + 1) as u64, correct_in_window as f64 / w as f64));
    }
    Ok(out)
}
