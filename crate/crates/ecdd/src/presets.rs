//! Named benchmark presets.
//!
//! A preset name reads `<stream>-<classifier>-<detector>[-arl<N>]`, e.g.
//! `gauss200-lda-ecdd-arl600` or `sine50-knn-none`. Streams cover the abrupt
//! synthetic benchmarks (change at T = 50 or 200, stream length 2T), their
//! gradual-drift variants (ramp over observations 200..300 of a length-400
//! stream), and the Electricity dataset (`elec`, which needs a data file).
//!
//! Reproduction presets run the detector without burn-in
//! (`min_observations = 0`) so results match the published protocol; the
//! production default burn-in applies only to detectors built directly.

use std::path::Path;

use crate::detector::DetectorConfig;
use crate::error::{EcddError, Result};
use crate::harness::{ClassifierKind, DetectorKind, ExperimentSpec};
use crate::streams::{electricity_spec, GeneratorKind, StreamSpec};

/// Default replication count, matching the published experiments.
pub const DEFAULT_REPLICATIONS: u64 = 10_000;
/// Default base seed for preset runs.
pub const DEFAULT_BASE_SEED: u64 = 20121;

/// All stream tokens accepted in preset names.
const STREAMS: [&str; 7] = [
    "gauss50", "gauss200", "sine50", "sine200", "driftgauss", "driftsine", "elec",
];

fn stream_spec(token: &str, data: Option<&Path>) -> Result<StreamSpec> {
    let synthetic = |generator, change_point, length, drift_ramp| StreamSpec {
        generator,
        change_point,
        length: Some(length),
        drift_ramp,
        seed: 0,
    };
    match token {
        "gauss50" => Ok(synthetic(GeneratorKind::Gauss, Some(50), 100, None)),
        "gauss200" => Ok(synthetic(GeneratorKind::Gauss, Some(200), 400, None)),
        "sine50" => Ok(synthetic(GeneratorKind::Sine, Some(50), 100, None)),
        "sine200" => Ok(synthetic(GeneratorKind::Sine, Some(200), 400, None)),
        "driftgauss" => Ok(synthetic(GeneratorKind::Gauss, None, 400, Some((200, 300)))),
        "driftsine" => Ok(synthetic(GeneratorKind::Sine, None, 400, Some((200, 300)))),
        "elec" => {
            let path = data.ok_or_else(|| {
                EcddError::Config(
                    "the 'elec' presets need the dataset file; pass --data <csv>".into(),
                )
            })?;
            Ok(electricity_spec(path.to_path_buf()))
        }
        other => Err(EcddError::Config(format!(
            "unknown stream '{other}' (expected one of {STREAMS:?})"
        ))),
    }
}

/// Detector configuration used by every reproduction preset.
pub fn preset_detector_config(lambda: f64, target_arl0: f64) -> DetectorConfig {
    DetectorConfig {
        lambda,
        target_arl0,
        warning_fraction: 0.5,
        min_observations: 0,
        warning_buffer_cap: None,
    }
}

/// Resolve a preset name into an experiment spec.
///
/// `lambda` overrides the EWMA weight (default 0.2); `data` supplies the CSV
/// path for the `elec` presets. Electricity presets run a single replication
/// (the dataset is one fixed stream); synthetic presets default to
/// [`DEFAULT_REPLICATIONS`].
pub fn parse_preset(name: &str, lambda: f64, data: Option<&Path>) -> Result<ExperimentSpec> {
    let parts: Vec<&str> = name.split('-').collect();
    if parts.len() < 3 {
        return Err(EcddError::Config(format!(
            "preset '{name}' does not match <stream>-<classifier>-<detector>[-arl<N>]"
        )));
    }
    let stream = stream_spec(parts[0], data)?;
    let classifier = match parts[1] {
        "lda" => ClassifierKind::Lda,
        "knn" => ClassifierKind::Knn { k: 3 },
        other => {
            return Err(EcddError::Config(format!(
                "unknown classifier '{other}' (expected lda or knn)"
            )))
        }
    };
    let detector = match (parts[2], parts.get(3)) {
        ("none", None) => DetectorKind::None,
        ("none", Some(extra)) => {
            return Err(EcddError::Config(format!(
                "preset '{name}': unexpected '{extra}' after detector 'none'"
            )))
        }
        (det @ ("ecdd" | "ecddwt"), Some(arl)) => {
            let target: f64 = arl
                .strip_prefix("arl")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| {
                    EcddError::Config(format!(
                        "preset '{name}': expected an arl<N> suffix, got '{arl}'"
                    ))
                })?;
            let config = preset_detector_config(lambda, target);
            if det == "ecdd" {
                DetectorKind::Ecdd(config)
            } else {
                DetectorKind::EcddWt(config)
            }
        }
        (det @ ("ecdd" | "ecddwt"), None) => {
            return Err(EcddError::Config(format!(
                "preset '{name}': detector '{det}' needs an arl<N> suffix"
            )))
        }
        (other, _) => {
            return Err(EcddError::Config(format!(
                "unknown detector '{other}' (expected ecdd, ecddwt or none)"
            )))
        }
    };
    let replications = if parts[0] == "elec" {
        1
    } else {
        DEFAULT_REPLICATIONS
    };
    Ok(ExperimentSpec {
        stream,
        classifier,
        detector,
        replications,
        base_seed: DEFAULT_BASE_SEED,
    })
}

/// Enumerate the bundled presets: every classifier/detector cell of the
/// abrupt benchmarks at ARL0 100 and 600, the gradual-drift cells at ARL0
/// 400, and the Electricity sweeps.
pub fn list_presets() -> Vec<String> {
    let mut names = Vec::new();
    for stream in ["gauss50", "gauss200", "sine50", "sine200"] {
        for classifier in ["lda", "knn"] {
            names.push(format!("{stream}-{classifier}-none"));
            for detector in ["ecdd", "ecddwt"] {
                for arl in [100, 600] {
                    names.push(format!("{stream}-{classifier}-{detector}-arl{arl}"));
                }
            }
        }
    }
    for stream in ["driftgauss", "driftsine"] {
        for classifier in ["lda", "knn"] {
            for detector in ["ecdd", "ecddwt"] {
                names.push(format!("{stream}-{classifier}-{detector}-arl400"));
            }
        }
    }
    for classifier in ["lda", "knn"] {
        names.push(format!("elec-{classifier}-none"));
        for arl in [100, 400, 600, 1000] {
            names.push(format!("elec-{classifier}-ecdd-arl{arl}"));
        }
    }
    names
}
