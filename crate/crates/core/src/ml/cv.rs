//! Stratified k-fold cross-validation of the two classifiers.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::forest::{fit_random_forest, ForestParams};
use super::logistic::{fit_logistic, predict_logistic};
use super::metrics::{fold_metrics, FoldMetrics};
use super::MlError;
use crate::corpus::Dimension;
use crate::features::{build_features, FeatureSet, LabeledInstance, ScalingMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Classifier {
    /// C1: unpenalized logistic regression with intercept.
    LogReg,
    /// C2: random forest.
    RandomForest,
}

impl Classifier {
    pub const ALL: [Classifier; 2] = [Classifier::LogReg, Classifier::RandomForest];

    pub fn code(self) -> &'static str {
        match self {
            Classifier::LogReg => "C1",
            Classifier::RandomForest => "C2",
        }
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Classifier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "logreg" | "lr" | "c1" | "logistic" => Ok(Classifier::LogReg),
            "rf" | "c2" | "forest" | "random-forest" => Ok(Classifier::RandomForest),
            _ => Err(format!("unknown classifier `{s}` (expected logreg or rf)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvConfig {
    pub folds: usize,
    pub shuffle: bool,
    pub seed: u64,
    pub scaling: ScalingMode,
    pub forest: ForestParams,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            shuffle: false,
            seed: 0,
            scaling: ScalingMode::PerFold,
            forest: ForestParams::default(),
        }
    }
}

/// Test-fold index for every instance.
///
/// Classes are taken in order of first appearance. The sorted label sequence
/// is dealt round-robin to folds to decide how many members of each class a
/// fold receives; each class's members are then assigned to folds in dataset
/// order (or shuffled, if requested). Fold sizes differ by at most one.
pub fn stratified_folds(y: &[u8], folds: usize, shuffle: bool, seed: u64) -> Result<Vec<usize>, MlError> {
    if folds < 2 {
        return Err(MlError::BadFoldCount(folds));
    }
    let mut classes: Vec<u8> = Vec::new();
    for &v in y {
        if !classes.contains(&v) {
            classes.push(v);
        }
    }
    let encoded: Vec<usize> = y.iter().map(|v| classes.iter().position(|c| c == v).unwrap()).collect();
    let mut counts = vec![0usize; classes.len()];
    for &e in &encoded {
        counts[e] += 1;
    }
    for (c, &count) in counts.iter().enumerate() {
        if count < folds {
            return Err(MlError::TooFewPerClass { class: classes[c], count, folds });
        }
    }
    if classes.len() < 2 {
        return Err(MlError::SingleClass);
    }

    let mut sorted = encoded.clone();
    sorted.sort_unstable();
    let mut allocation = vec![vec![0usize; classes.len()]; folds];
    for (i, &c) in sorted.iter().enumerate() {
        allocation[i % folds][c] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; y.len()];
    for c in 0..classes.len() {
        let mut per_class: Vec<usize> = (0..folds).flat_map(|f| std::iter::repeat_n(f, allocation[f][c])).collect();
        if shuffle {
            per_class.shuffle(&mut rng);
        }
        let members = encoded.iter().enumerate().filter(|(_, &e)| e == c).map(|(i, _)| i);
        for (i, f) in members.zip(per_class) {
            assignment[i] = f;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub acc: f64,
    pub f1: f64,
    pub mcc: f64,
    /// Mean over folds where AUC is defined.
    pub roc_auc: Option<f64>,
}

impl MetricsSummary {
    pub fn mean_of(folds: &[FoldMetrics]) -> MetricsSummary {
        let n = folds.len() as f64;
        let aucs: Vec<f64> = folds.iter().filter_map(|f| f.roc_auc).collect();
        MetricsSummary {
            acc: folds.iter().map(|f| f.acc).sum::<f64>() / n,
            f1: folds.iter().map(|f| f.f1).sum::<f64>() / n,
            mcc: folds.iter().map(|f| f.mcc).sum::<f64>() / n,
            roc_auc: (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub dimension: Dimension,
    pub feature_set: FeatureSet,
    pub classifier: Classifier,
    pub summary: MetricsSummary,
    pub folds: Vec<FoldMetrics>,
    pub n_instances: usize,
    pub seed: u64,
    pub scaling: ScalingMode,
    pub shuffled: bool,
}

fn run_fold(
    instances: &[LabeledInstance],
    y: &[u8],
    assignment: &[usize],
    fold: usize,
    feature_set: FeatureSet,
    classifier: Classifier,
    cfg: &CvConfig,
    forest_seed: u64,
) -> Result<FoldMetrics, MlError> {
    let train: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] != fold).collect();
    let test: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] == fold).collect();
    let y_train: Vec<u8> = train.iter().map(|&i| y[i]).collect();
    let y_test: Vec<u8> = test.iter().map(|&i| y[i]).collect();
    if y_train.iter().all(|&v| v == y_train[0]) {
        return Err(MlError::FoldTrainSingleClass { fold });
    }
    let features = build_features(instances, feature_set.columns(), cfg.scaling, &train)?;
    let x_train = features.select_rows(&train);
    let x_test = features.select_rows(&test);
    let (pred, score) = match classifier {
        Classifier::LogReg => {
            let names: Vec<&str> = feature_set.columns().iter().map(|c| c.name()).collect();
            let fit = fit_logistic(&x_train, &y_train, &names)?;
            predict_logistic(&fit, &x_test)?
        }
        Classifier::RandomForest => fit_random_forest(&x_train, &y_train, &cfg.forest, forest_seed)?.predict(&x_test)?,
    };
    fold_metrics(&y_test, &pred, &score)
}

/// Cross-validates one (dimension, feature set, classifier) configuration.
/// Instances must already carry labels for `dimension`.
pub fn cross_validate(
    instances: &[LabeledInstance],
    dimension: Dimension,
    feature_set: FeatureSet,
    classifier: Classifier,
    cfg: &CvConfig,
) -> Result<EvaluationReport, MlError> {
    let y: Vec<u8> = instances.iter().map(|i| i.label).collect();
    let assignment = stratified_folds(&y, cfg.folds, cfg.shuffle, cfg.seed)?;
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fold_seeds: Vec<u64> = (0..cfg.folds).map(|_| master.next_u64()).collect();

    let folds = fold_seeds
        .into_par_iter()
        .enumerate()
        .map(|(fold, s)| {
            run_fold(instances, &y, &assignment, fold, feature_set, classifier, cfg, s)
                .map_err(|e| MlError::Fold { fold, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(EvaluationReport {
        dimension,
        feature_set,
        classifier,
        summary: MetricsSummary::mean_of(&folds),
        folds,
        n_instances: instances.len(),
        seed: cfg.seed,
        scaling: cfg.scaling,
        shuffled: cfg.shuffle,
    })
}
