//! Binary classification metrics with class 1 as the positive class.

use serde::Serialize;

use super::MlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// Positive-class F1; 0 (with a warning) when there are no positives at
    /// all, predicted or actual.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            log::warn!("F1 undefined (no positive labels or predictions); reporting 0");
            return 0.0;
        }
        (2 * self.tp) as f64 / denom as f64
    }

    /// Matthews correlation; 0 (with a warning) when any marginal is empty.
    pub fn mcc(&self) -> f64 {
        let (tp, fp, fn_, tn) = (self.tp as f64, self.fp as f64, self.fn_ as f64, self.tn as f64);
        let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        if denom == 0.0 {
            log::warn!("MCC undefined (empty confusion-matrix margin); reporting 0");
            return 0.0;
        }
        (tp * tn - fp * fn_) / denom.sqrt()
    }
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<Confusion, MlError> {
    if y_true.len() != y_pred.len() {
        return Err(MlError::LengthMismatch { expected: y_true.len(), got: y_pred.len() });
    }
    let mut c = Confusion::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == 1, p == 1) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half. `None` when either class is absent.
pub fn roc_auc(y_true: &[u8], scores: &[f64]) -> Option<f64> {
    assert_eq!(y_true.len(), scores.len(), "labels and scores differ in length");
    let n_pos = y_true.iter().filter(|&&y| y == 1).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Walk groups of equal score in increasing order, counting the
    // negatives strictly below each group. Counts stay integral (in halves)
    // so the result equals the pairwise count exactly.
    let mut twice_wins: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u128, 0u128);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if y_true[order[j]] == 1 {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        twice_wins += pos * (2 * neg_below + neg);
        neg_below += neg;
        i = j;
    }
    Some(twice_wins as f64 / (2.0 * n_pos as f64 * n_neg as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub acc: f64,
    pub f1: f64,
    pub mcc: f64,
    pub roc_auc: Option<f64>,
    pub n_test: usize,
}

pub fn fold_metrics(y_true: &[u8], y_pred: &[u8], y_score: &[f64]) -> Result<FoldMetrics, MlError> {
    let c = confusion(y_true, y_pred)?;
    if y_score.len() != y_true.len() {
        return Err(MlError::LengthMismatch { expected: y_true.len(), got: y_score.len() });
    }
    let roc_auc = roc_auc(y_true, y_score);
    if roc_auc.is_none() {
        log::warn!("ROC AUC undefined for a single-class test fold");
    }
    Ok(FoldMetrics {
        acc: c.accuracy(),
        f1: c.f1(),
        mcc: c.mcc(),
        roc_auc,
        n_test: y_true.len(),
    })
}
