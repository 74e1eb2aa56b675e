//! Labeled-sample sources: synthetic benchmark generators and CSV ingestion.
//!
//! Every source is deterministic given its spec (seed included) and pull
//! based: `next_sample` yields samples until the configured length is
//! exhausted. Synthetic streams support an abrupt change point (labels
//! reverse after `T`) or a gradual drift ramp (each label flips with a
//! probability rising linearly from 0 to 1 across the ramp window).

use std::fmt;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classifiers::LabeledSample;
use crate::error::{EcddError, Result};

/// Column reference in a CSV file: positional index or header name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "column {i}"),
            ColumnSelector::Name(n) => write!(f, "column '{n}'"),
        }
    }
}

/// What produces the samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// Two overlapping bivariate Gaussians: class 0 from N((0,0), I), class 1
    /// from N((2,0), 4I), classes drawn 50/50.
    Gauss,
    /// Uniform points on the unit square, class 0 strictly below y = sin(x).
    Sine,
    /// Rows of a CSV file, in file order.
    Csv {
        path: PathBuf,
        feature_columns: Vec<ColumnSelector>,
        label_column: ColumnSelector,
        has_header: bool,
    },
}

/// Declarative stream description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub generator: GeneratorKind,
    /// Labels reverse for t > change_point (synthetic only).
    pub change_point: Option<u64>,
    /// Sample count. Required for synthetic generators; `None` on a CSV
    /// stream means the whole file.
    pub length: Option<u64>,
    /// Gradual drift window `(start, end)`: the label-switch probability is 0
    /// through `start`, then rises linearly to 1 at `end` (synthetic only,
    /// exclusive with `change_point`).
    pub drift_ramp: Option<(u64, u64)>,
    pub seed: u64,
}

impl StreamSpec {
    pub fn validate(&self) -> Result<()> {
        let synthetic = !matches!(self.generator, GeneratorKind::Csv { .. });
        if synthetic {
            let length = self.length.ok_or_else(|| {
                EcddError::Config("synthetic streams require a length".into())
            })?;
            if length < 1 {
                return Err(EcddError::Config("stream length must be at least 1".into()));
            }
            if let Some(t) = self.change_point {
                if t >= length {
                    return Err(EcddError::Config(format!(
                        "change point {t} must precede the stream length {length}"
                    )));
                }
            }
            if let Some((start, end)) = self.drift_ramp {
                if start >= end {
                    return Err(EcddError::Config(format!(
                        "drift ramp start {start} must precede end {end}"
                    )));
                }
                if self.change_point.is_some() {
                    return Err(EcddError::Config(
                        "drift_ramp and change_point are mutually exclusive".into(),
                    ));
                }
            }
        } else {
            if self.drift_ramp.is_some() {
                return Err(EcddError::Config(
                    "drift_ramp requires a synthetic generator".into(),
                ));
            }
            if self.change_point.is_some() {
                return Err(EcddError::Config(
                    "change_point requires a synthetic generator".into(),
                ));
            }
            if self.length == Some(0) {
                return Err(EcddError::Config("stream length must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// Pull-based sample source; `Ok(None)` marks the end of the stream.
pub trait StreamSource {
    fn next_sample(&mut self) -> Result<Option<LabeledSample>>;
}

/// Construct the source described by `spec`.
pub fn open_stream(spec: &StreamSpec) -> Result<Box<dyn StreamSource>> {
    spec.validate()?;
    match &spec.generator {
        GeneratorKind::Gauss => Ok(Box::new(SyntheticStream::new(spec.clone(), Flavor::Gauss))),
        GeneratorKind::Sine => Ok(Box::new(SyntheticStream::new(spec.clone(), Flavor::Sine))),
        GeneratorKind::Csv {
            path,
            feature_columns,
            label_column,
            has_header,
        } => Ok(Box::new(CsvStream::open(
            path.clone(),
            feature_columns.clone(),
            label_column.clone(),
            *has_header,
            spec.length,
        )?)),
    }
}

/// Drain a source into a vector.
pub fn collect_stream(spec: &StreamSpec) -> Result<Vec<LabeledSample>> {
    let mut source = open_stream(spec)?;
    let mut out = Vec::new();
    while let Some(sample) = source.next_sample()? {
        out.push(sample);
    }
    Ok(out)
}

enum Flavor {
    Gauss,
    Sine,
}

struct SyntheticStream {
    spec: StreamSpec,
    flavor: Flavor,
    rng: ChaCha8Rng,
    t: u64,
}

impl SyntheticStream {
    fn new(spec: StreamSpec, flavor: Flavor) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(spec.seed);
        SyntheticStream {
            spec,
            flavor,
            rng,
            t: 0,
        }
    }
}

impl StreamSource for SyntheticStream {
    fn next_sample(&mut self) -> Result<Option<LabeledSample>> {
        let length = self.spec.length.expect("validated synthetic spec");
        if self.t >= length {
            return Ok(None);
        }
        self.t += 1;
        let (features, base_label) = match self.flavor {
            Flavor::Gauss => {
                let class = u8::from(self.rng.random::<bool>());
                let n1: f64 = self.rng.sample(StandardNormal);
                let n2: f64 = self.rng.sample(StandardNormal);
                let features = if class == 0 {
                    vec![n1, n2]
                } else {
                    vec![2.0 + 2.0 * n1, 2.0 * n2]
                };
                (features, class)
            }
            Flavor::Sine => {
                let x: f64 = self.rng.random();
                let y: f64 = self.rng.random();
                // The measure-zero boundary y = sin(x) belongs to class 1.
                let label = u8::from(y >= x.sin());
                (vec![x, y], label)
            }
        };
        // The flip variate is drawn unconditionally so that stationary,
        // abrupt-change and drift-ramp streams with the same seed emit the
        // same features and pre-change labels sample for sample.
        let flip_draw: f64 = self.rng.random();
        let label = if let Some((start, end)) = self.spec.drift_ramp {
            let q = if self.t <= start {
                0.0
            } else if self.t >= end {
                1.0
            } else {
                (self.t - start) as f64 / (end - start) as f64
            };
            if flip_draw < q {
                1 - base_label
            } else {
                base_label
            }
        } else if self.spec.change_point.is_some_and(|cp| self.t > cp) {
            1 - base_label
        } else {
            base_label
        };
        Ok(Some(LabeledSample::new(features, label)))
    }
}

struct CsvStream {
    path: PathBuf,
    reader: csv::Reader<std::fs::File>,
    feature_indices: Vec<usize>,
    label_index: usize,
    remaining: Option<u64>,
    emitted: u64,
}

impl CsvStream {
    fn open(
        path: PathBuf,
        feature_columns: Vec<ColumnSelector>,
        label_column: ColumnSelector,
        has_header: bool,
        length: Option<u64>,
    ) -> Result<Self> {
        let file = std::fs::File::open(&path).map_err(|e| EcddError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .flexible(false)
            .from_reader(file);
        let headers = if has_header {
            Some(
                reader
                    .headers()
                    .map_err(|e| {
                        EcddError::Parse(format!("{}: cannot read header: {e}", path.display()))
                    })?
                    .clone(),
            )
        } else {
            None
        };
        let resolve = |sel: &ColumnSelector| -> Result<usize> {
            match sel {
                ColumnSelector::Index(i) => Ok(*i),
                ColumnSelector::Name(name) => headers
                    .as_ref()
                    .ok_or_else(|| {
                        EcddError::Config(format!(
                            "{sel} referenced by name but the file is declared header-less"
                        ))
                    })?
                    .iter()
                    .position(|h| h.trim() == name)
                    .ok_or_else(|| {
                        EcddError::Config(format!(
                            "{sel} not found in the header of {}",
                            path.display()
                        ))
                    }),
            }
        };
        let feature_indices = feature_columns
            .iter()
            .map(resolve)
            .collect::<Result<Vec<usize>>>()?;
        let label_index = resolve(&label_column)?;
        Ok(CsvStream {
            path,
            reader,
            feature_indices,
            label_index,
            remaining: length,
            emitted: 0,
        })
    }

    fn malformed(&self, line: u64, msg: String) -> EcddError {
        EcddError::Malformed {
            path: self.path.display().to_string(),
            line,
            msg,
        }
    }
}

/// Accepted label spellings: 0/1 or the UP/DOWN price-movement coding
/// (UP = price rose against its moving average = class 0).
fn parse_label(raw: &str) -> Option<u8> {
    match raw.trim() {
        "0" => Some(0),
        "1" => Some(1),
        other => match other.to_ascii_uppercase().as_str() {
            "UP" => Some(0),
            "DOWN" => Some(1),
            _ => None,
        },
    }
}

impl StreamSource for CsvStream {
    fn next_sample(&mut self) -> Result<Option<LabeledSample>> {
        if self.remaining == Some(self.emitted) {
            return Ok(None);
        }
        let mut record = csv::StringRecord::new();
        let more = self
            .reader
            .read_record(&mut record)
            .map_err(|e| match e.position() {
                Some(pos) => self.malformed(pos.line(), e.to_string()),
                None => EcddError::Parse(format!("{}: {e}", self.path.display())),
            })?;
        if !more {
            if let Some(expected) = self.remaining {
                return Err(EcddError::Input(format!(
                    "{}: stream length {expected} requested but the file ended after {} rows",
                    self.path.display(),
                    self.emitted
                )));
            }
            return Ok(None);
        }
        let line = record.position().map_or(0, |p| p.line());
        let field = |idx: usize| -> Result<&str> {
            record.get(idx).ok_or_else(|| {
                self.malformed(line, format!("row has no column {idx}"))
            })
        };
        let mut features = Vec::with_capacity(self.feature_indices.len());
        for &idx in &self.feature_indices {
            let raw = field(idx)?;
            let value: f64 = raw.trim().parse().map_err(|_| {
                self.malformed(line, format!("'{raw}' in column {idx} is not a number"))
            })?;
            features.push(value);
        }
        let raw_label = field(self.label_index)?;
        let label = parse_label(raw_label).ok_or_else(|| {
            self.malformed(
                line,
                format!("'{raw_label}' in column {} is not a binary label", self.label_index),
            )
        })?;
        self.emitted += 1;
        Ok(Some(LabeledSample::new(features, label)))
    }
}

/// The Electricity market preset: demand features and the published
/// price-movement label.
pub fn electricity_spec(path: PathBuf) -> StreamSpec {
    StreamSpec {
        generator: GeneratorKind::Csv {
            path,
            feature_columns: vec![
                ColumnSelector::Name("nswdemand".into()),
                ColumnSelector::Name("vicdemand".into()),
            ],
            label_column: ColumnSelector::Name("class".into()),
            has_header: true,
        },
        change_point: None,
        length: None,
        drift_ramp: None,
        seed: 0,
    }
}
