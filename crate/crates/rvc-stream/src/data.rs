//! Dataset ingestion (CSV, row order = stream order) and synthetic drifting
//! regression streams for desk-scale testing.

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::core::{LabeledSample, RngSeed};
use crate::error::{Error, Result};

/// How rows with missing (empty) cells are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Drop the row.
    #[default]
    Drop,
    /// Fail ingestion.
    Error,
}

/// Schema of one CSV dataset: which column is the target, which are
/// features, and optionally how many rows to expect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub target: String,
    pub features: Vec<String>,
    #[serde(default)]
    pub expected_rows: Option<usize>,
    #[serde(default)]
    pub missing: MissingPolicy,
}

impl DatasetSpec {
    fn validate(&self) -> Result<()> {
        if self.features.contains(&self.target) {
            return Err(Error::Config(format!(
                "target column {:?} also listed as a feature",
                self.target
            )));
        }
        if self.features.is_empty() {
            return Err(Error::Config("no feature columns".into()));
        }
        Ok(())
    }
}

/// Load a CSV file per the spec. Rows keep file order (the stream order).
pub fn load_csv(path: &Path, spec: &DatasetSpec) -> Result<Vec<LabeledSample>> {
    spec.validate()?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let target_idx = col(&spec.target)?;
    let feature_idx: Vec<usize> = spec
        .features
        .iter()
        .map(|f| col(f))
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        let row = row_no + 2; // 1-based, after the header
        let mut values = Vec::with_capacity(feature_idx.len() + 1);
        let mut missing = false;
        for (&idx, name) in feature_idx
            .iter()
            .zip(&spec.features)
            .map(|(i, n)| (i, n.as_str()))
            .chain(std::iter::once((&target_idx, spec.target.as_str())))
        {
            let raw = record.get(idx).unwrap_or("").trim();
            if raw.is_empty() {
                missing = true;
                if spec.missing == MissingPolicy::Error {
                    return Err(Error::UnparsableValue {
                        row,
                        column: name.to_string(),
                        value: raw.to_string(),
                    });
                }
                continue;
            }
            let v: f64 = raw.parse().map_err(|_| Error::UnparsableValue {
                row,
                column: name.to_string(),
                value: raw.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::UnparsableValue {
                    row,
                    column: name.to_string(),
                    value: raw.to_string(),
                });
            }
            values.push(v);
        }
        if missing {
            continue;
        }
        let target = values.pop().unwrap();
        out.push(LabeledSample::new(values, target));
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(expected) = spec.expected_rows {
        if out.len() != expected {
            return Err(Error::Config(format!(
                "dataset {:?}: expected {expected} rows, found {}",
                spec.name,
                out.len()
            )));
        }
    }
    Ok(out)
}

/// Write labeled samples as a CSV consumable by `load_csv` with feature
/// columns x1..xD and target column y.
pub fn write_csv(path: &Path, samples: &[LabeledSample]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let dim = samples.first().map_or(0, |s| s.sample.dim());
    let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    writer.write_record(&header)?;
    for s in samples {
        let mut row: Vec<String> = s.sample.features.iter().map(|v| format!("{v:.16e}")).collect();
        row.push(format!("{:.16e}", s.target));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Default spec for synthetic CSV files written by `write_csv`.
pub fn synthetic_csv_spec(name: &str, dim: usize) -> DatasetSpec {
    DatasetSpec {
        name: name.into(),
        target: "y".into(),
        features: (1..=dim).map(|i| format!("x{i}")).collect(),
        expected_rows: None,
        missing: MissingPolicy::Drop,
    }
}

/// Kind of synthetic stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftKind {
    /// Linear coefficients switch at `drift_position`.
    Abrupt,
    /// Coefficients interpolate linearly over `drift_width` steps starting
    /// at `drift_position`.
    Gradual,
    /// No drift; noise scale grows with the feature norm, so errors are
    /// predictable from inputs.
    HeteroscedasticStatic,
}

/// Spec for a synthetic drifting-regression stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDriftSpec {
    pub kind: DriftKind,
    pub length: usize,
    pub dimension: usize,
    #[serde(default)]
    pub drift_position: usize,
    #[serde(default)]
    pub drift_width: usize,
    pub noise_scale: f64,
    pub seed: u64,
}

impl SyntheticDriftSpec {
    fn validate(&self) -> Result<()> {
        if self.length == 0 || self.dimension == 0 {
            return Err(Error::InvalidSpec("length and dimension must be positive".into()));
        }
        if self.noise_scale < 0.0 {
            return Err(Error::InvalidSpec("noise scale must be non-negative".into()));
        }
        match self.kind {
            DriftKind::Abrupt | DriftKind::Gradual => {
                if self.drift_position >= self.length {
                    return Err(Error::InvalidSpec(format!(
                        "drift position {} outside stream of length {}",
                        self.drift_position, self.length
                    )));
                }
                if self.kind == DriftKind::Gradual && self.drift_width == 0 {
                    return Err(Error::InvalidSpec("gradual drift needs a positive width".into()));
                }
            }
            DriftKind::HeteroscedasticStatic => {}
        }
        Ok(())
    }

    /// The noiseless target at position `t`, exposed so tests can check
    /// the piecewise-linear mapping directly.
    pub fn clean_target(&self, t: usize, x: &[f64], w_a: &[f64], w_b: &[f64]) -> f64 {
        let dot = |w: &[f64]| w.iter().zip(x).map(|(&a, &b)| a * b).sum::<f64>();
        match self.kind {
            DriftKind::HeteroscedasticStatic => dot(w_a),
            DriftKind::Abrupt => {
                if t < self.drift_position {
                    dot(w_a)
                } else {
                    dot(w_b)
                }
            }
            DriftKind::Gradual => {
                let frac = if t < self.drift_position {
                    0.0
                } else if t >= self.drift_position + self.drift_width {
                    1.0
                } else {
                    (t - self.drift_position) as f64 / self.drift_width as f64
                };
                (1.0 - frac) * dot(w_a) + frac * dot(w_b)
            }
        }
    }
}

/// Generate a synthetic stream. Same seed, same stream, bit for bit.
pub fn generate_synthetic(spec: &SyntheticDriftSpec) -> Result<Vec<LabeledSample>> {
    spec.validate()?;
    let seed = RngSeed(spec.seed);
    let mut coeff_rng = seed.stream(0xc0ef);
    let w_a: Vec<f64> = (0..spec.dimension)
        .map(|_| StandardNormal.sample(&mut coeff_rng))
        .collect();
    let w_b: Vec<f64> = (0..spec.dimension)
        .map(|_| StandardNormal.sample(&mut coeff_rng))
        .collect();

    let mut x_rng = seed.stream(0xfea7);
    let mut noise_rng = seed.stream(0x0153);
    let mut out = Vec::with_capacity(spec.length);
    for t in 0..spec.length {
        let x: Vec<f64> = (0..spec.dimension)
            .map(|_| x_rng.gen_range(-1.0..1.0))
            .collect();
        let clean = spec.clean_target(t, &x, &w_a, &w_b);
        let z: f64 = StandardNormal.sample(&mut noise_rng);
        let noise = match spec.kind {
            DriftKind::HeteroscedasticStatic => {
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                spec.noise_scale * norm * z
            }
            _ => spec.noise_scale * z,
        };
        out.push(LabeledSample::new(x, clean + noise));
    }
    Ok(out)
}
