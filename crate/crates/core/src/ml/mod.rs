//! Classifiers, evaluation metrics and stratified cross-validation.

pub mod cv;
pub mod forest;
pub mod logistic;
pub mod metrics;

use thiserror::Error;

use crate::features::FeatureError;

pub use cv::{cross_validate, stratified_folds, Classifier, CvConfig, EvaluationReport, MetricsSummary};
pub use forest::{fit_random_forest, ForestParams, MaxFeatures, RandomForest};
pub use logistic::{fit_logistic, predict_logistic, CoefficientEstimate, LogisticFit};
pub use metrics::{confusion, fold_metrics, roc_auc, Confusion, FoldMetrics};

#[derive(Debug, Error)]
pub enum MlError {
    #[error("labels contain a single class")]
    SingleClass,
    #[error("complete or quasi-complete separation: coefficients diverge")]
    Separation,
    #[error("information matrix is singular (collinear or constant features)")]
    Singular,
    #[error("model did not converge")]
    NotConverged,
    #[error("expected {expected} feature columns, got {got}")]
    FeatureMismatch { expected: usize, got: usize },
    #[error("expected {expected} labels, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("class {class} has {count} members, fewer than {folds} folds")]
    TooFewPerClass { class: u8, count: usize, folds: usize },
    #[error("need at least 2 folds, got {0}")]
    BadFoldCount(usize),
    #[error("fold {fold}: training part has a single class")]
    FoldTrainSingleClass { fold: usize },
    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: Box<MlError> },
    #[error(transparent)]
    Feature(#[from] FeatureError),
}
