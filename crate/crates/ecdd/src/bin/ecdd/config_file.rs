//! TOML experiment configuration, mirroring the library's spec types.
//!
//! ```toml
//! replications = 1000
//! base_seed = 42            # generated and printed when omitted
//!
//! [stream]
//! generator = "gauss"       # gauss | sine | csv
//! length = 400              # optional for csv (whole file)
//! change_point = 200        # optional, synthetic only
//! # drift_ramp = [200, 300] # optional, synthetic only
//! # path = "elec2.csv"               # csv only
//! # feature_columns = ["nswdemand", "vicdemand"]  # names or 0-based indices
//! # label_column = "class"
//! # has_header = true
//!
//! [classifier]
//! kind = "lda"              # lda | knn
//! # k = 3
//!
//! [detector]
//! kind = "ecdd"             # ecdd | ecddwt | none
//! lambda = 0.2
//! arl0 = 600
//! # warning_fraction = 0.5
//! # min_observations = 30
//! # warning_buffer_cap = 32
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use ecdd::detector::{DetectorConfig, DEFAULT_MIN_OBSERVATIONS};
use ecdd::error::{EcddError, Result};
use ecdd::harness::{ClassifierKind, DetectorKind, ExperimentSpec};
use ecdd::streams::{ColumnSelector, GeneratorKind, StreamSpec};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    replications: Option<u64>,
    base_seed: Option<u64>,
    stream: StreamSection,
    classifier: ClassifierSection,
    detector: DetectorSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StreamSection {
    generator: String,
    length: Option<u64>,
    change_point: Option<u64>,
    drift_ramp: Option<[u64; 2]>,
    path: Option<PathBuf>,
    feature_columns: Option<Vec<ColumnSelector>>,
    label_column: Option<ColumnSelector>,
    has_header: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifierSection {
    kind: String,
    k: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorSection {
    kind: String,
    lambda: Option<f64>,
    arl0: Option<f64>,
    warning_fraction: Option<f64>,
    min_observations: Option<u64>,
    warning_buffer_cap: Option<usize>,
}

pub fn load_experiment_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| EcddError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let file: FileConfig = toml::from_str(&text)
        .map_err(|e| EcddError::Parse(format!("{}: {e}", path.display())))?;

    let generator = match file.stream.generator.as_str() {
        "gauss" => GeneratorKind::Gauss,
        "sine" => GeneratorKind::Sine,
        "csv" => GeneratorKind::Csv {
            path: file.stream.path.ok_or_else(|| {
                EcddError::Config("csv stream needs stream.path".into())
            })?,
            feature_columns: file.stream.feature_columns.ok_or_else(|| {
                EcddError::Config("csv stream needs stream.feature_columns".into())
            })?,
            label_column: file.stream.label_column.ok_or_else(|| {
                EcddError::Config("csv stream needs stream.label_column".into())
            })?,
            has_header: file.stream.has_header.unwrap_or(false),
        },
        other => {
            return Err(EcddError::Config(format!(
                "unknown generator '{other}' (expected gauss, sine or csv)"
            )))
        }
    };
    let stream = StreamSpec {
        generator,
        change_point: file.stream.change_point,
        length: file.stream.length,
        drift_ramp: file.stream.drift_ramp.map(|[a, b]| (a, b)),
        seed: 0,
    };
    stream.validate()?;

    let classifier = match file.classifier.kind.as_str() {
        "lda" => ClassifierKind::Lda,
        "knn" => ClassifierKind::Knn {
            k: file.classifier.k.unwrap_or(3),
        },
        other => {
            return Err(EcddError::Config(format!(
                "unknown classifier '{other}' (expected lda or knn)"
            )))
        }
    };

    let detector = match file.detector.kind.as_str() {
        "none" => DetectorKind::None,
        kind @ ("ecdd" | "ecddwt") => {
            let config = DetectorConfig {
                lambda: file.detector.lambda.unwrap_or(0.2),
                target_arl0: file.detector.arl0.ok_or_else(|| {
                    EcddError::Config("detector needs an arl0 value".into())
                })?,
                warning_fraction: file.detector.warning_fraction.unwrap_or(0.5),
                min_observations: file
                    .detector
                    .min_observations
                    .unwrap_or(DEFAULT_MIN_OBSERVATIONS),
                warning_buffer_cap: file.detector.warning_buffer_cap,
            };
            config.validate()?;
            if kind == "ecdd" {
                DetectorKind::Ecdd(config)
            } else {
                DetectorKind::EcddWt(config)
            }
        }
        other => {
            return Err(EcddError::Config(format!(
                "unknown detector '{other}' (expected ecdd, ecddwt or none)"
            )))
        }
    };

    Ok(ExperimentSpec {
        stream,
        classifier,
        detector,
        replications: file.replications.unwrap_or(1),
        base_seed: file.base_seed.unwrap_or_else(rand::random),
    })
}
