//! Binary labels from Likert vectors, and log-transformed, standardized
//! feature matrices built from (cross-entropy, LLOC).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Dimension, MaintainabilityRating};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("file `{file}`: {what} must be positive, got {value}")]
    NonPositive { file: String, what: &'static str, value: f64 },
    #[error("column `{0}` has zero spread in the scaling subset (degenerate fold)")]
    ZeroSpread(FeatureColumn),
    #[error("empty scaling subset")]
    EmptySubset,
    #[error("row index {0} out of range")]
    BadIndex(usize),
}

/// 1 iff the deciding probability is strictly above one half: P(strongly
/// agree) for Ov/Rd/Ud, P(strongly disagree) for the negatively phrased Cx/Md.
pub fn binarize(rating: &MaintainabilityRating, dim: Dimension) -> u8 {
    let likert = rating.get(dim);
    let deciding = if dim.is_negative() { likert.sd } else { likert.sa };
    u8::from(deciding > 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub file_id: String,
    pub lloc: usize,
    pub ce: f64,
    pub label: u8,
    pub dimension: Dimension,
}

impl LabeledInstance {
    pub fn new(file_id: impl Into<String>, lloc: usize, ce: f64, label: u8, dimension: Dimension) -> Result<Self, FeatureError> {
        let file_id = file_id.into();
        if lloc == 0 {
            return Err(FeatureError::NonPositive { file: file_id, what: "lloc", value: 0.0 });
        }
        if !(ce > 0.0 && ce.is_finite()) {
            return Err(FeatureError::NonPositive { file: file_id, what: "cross-entropy", value: ce });
        }
        debug_assert!(label <= 1);
        Ok(LabeledInstance { file_id, lloc, ce, label, dimension })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureColumn {
    LogCe,
    LogLloc,
}

impl FeatureColumn {
    pub fn name(self) -> &'static str {
        match self {
            FeatureColumn::LogCe => "log_ce",
            FeatureColumn::LogLloc => "log_lloc",
        }
    }

    fn raw(self, inst: &LabeledInstance) -> f64 {
        match self {
            FeatureColumn::LogCe => inst.ce.ln(),
            FeatureColumn::LogLloc => (inst.lloc as f64).ln(),
        }
    }
}

impl fmt::Display for FeatureColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Feature blocks: a) LLOC only (baseline), b) cross-entropy only, c) both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Lloc,
    Ce,
    Both,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 3] = [FeatureSet::Lloc, FeatureSet::Ce, FeatureSet::Both];

    pub fn columns(self) -> &'static [FeatureColumn] {
        match self {
            FeatureSet::Lloc => &[FeatureColumn::LogLloc],
            FeatureSet::Ce => &[FeatureColumn::LogCe],
            FeatureSet::Both => &[FeatureColumn::LogCe, FeatureColumn::LogLloc],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Lloc => "lloc",
            FeatureSet::Ce => "ce",
            FeatureSet::Both => "both",
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lloc" | "a" => Ok(FeatureSet::Lloc),
            "ce" | "b" => Ok(FeatureSet::Ce),
            "both" | "c" => Ok(FeatureSet::Both),
            other => Err(format!("unknown feature set `{other}` (expected lloc|ce|both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMode {
    /// Statistics from the training part of each fold only.
    #[default]
    PerFold,
    /// Statistics from every instance.
    Global,
}

impl fmt::Display for ScalingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalingMode::PerFold => "per-fold",
            ScalingMode::Global => "global",
        })
    }
}

impl FromStr for ScalingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-fold" => Ok(ScalingMode::PerFold),
            "global" => Ok(ScalingMode::Global),
            other => Err(format!("unknown scaling mode `{other}` (expected per-fold|global)")),
        }
    }
}

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Fits on the given rows of `raw`. Zero spread is an error.
    pub fn fit(raw: &DMatrix<f64>, rows: &[usize], columns: &[FeatureColumn]) -> Result<Self, FeatureError> {
        if rows.is_empty() {
            return Err(FeatureError::EmptySubset);
        }
        let n = rows.len() as f64;
        let mut mean = Vec::with_capacity(raw.ncols());
        let mut std = Vec::with_capacity(raw.ncols());
        for j in 0..raw.ncols() {
            let m = rows.iter().map(|&i| raw[(i, j)]).sum::<f64>() / n;
            let var = rows.iter().map(|&i| (raw[(i, j)] - m).powi(2)).sum::<f64>() / n;
            let s = var.sqrt();
            if !(s > 0.0) {
                return Err(FeatureError::ZeroSpread(columns[j]));
            }
            mean.push(m);
            std.push(s);
        }
        Ok(Scaler { mean, std })
    }

    pub fn transform(&self, raw: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(raw.nrows(), raw.ncols(), |i, j| (raw[(i, j)] - self.mean[j]) / self.std[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    /// One row per instance, in input order.
    pub values: DMatrix<f64>,
    pub columns: Vec<FeatureColumn>,
    pub scaler: Scaler,
    pub mode: ScalingMode,
}

impl FeatureMatrix {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    /// Rows at `idx`, in that order.
    pub fn select_rows(&self, idx: &[usize]) -> DMatrix<f64> {
        self.values.select_rows(idx)
    }
}

/// Natural-log features for every instance, before scaling.
pub fn raw_features(instances: &[LabeledInstance], columns: &[FeatureColumn]) -> Result<DMatrix<f64>, FeatureError> {
    for inst in instances {
        if inst.lloc == 0 {
            return Err(FeatureError::NonPositive { file: inst.file_id.clone(), what: "lloc", value: 0.0 });
        }
        if !(inst.ce > 0.0) {
            return Err(FeatureError::NonPositive {
                file: inst.file_id.clone(),
                what: "cross-entropy",
                value: inst.ce,
            });
        }
    }
    Ok(DMatrix::from_fn(instances.len(), columns.len(), |i, j| columns[j].raw(&instances[i])))
}

/// Log-transforms and standardizes. In per-fold mode the statistics come from
/// `train_rows` only and are applied to all rows; in global mode every row is
/// used and `train_rows` is ignored.
pub fn build_features(
    instances: &[LabeledInstance],
    columns: &[FeatureColumn],
    mode: ScalingMode,
    train_rows: &[usize],
) -> Result<FeatureMatrix, FeatureError> {
    let raw = raw_features(instances, columns)?;
    let all: Vec<usize>;
    let fit_rows = match mode {
        ScalingMode::PerFold => {
            if let Some(&bad) = train_rows.iter().find(|&&i| i >= instances.len()) {
                return Err(FeatureError::BadIndex(bad));
            }
            train_rows
        }
        ScalingMode::Global => {
            all = (0..instances.len()).collect();
            &all
        }
    };
    let scaler = Scaler::fit(&raw, fit_rows, columns)?;
    Ok(FeatureMatrix {
        values: scaler.transform(&raw),
        columns: columns.to_vec(),
        scaler,
        mode,
    })
}
