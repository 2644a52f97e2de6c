//! Does cross-entropy still predict the label once size is accounted for?
//!
//! For each model the log-CE logistic coefficient is estimated three ways:
//! alone (marginal), next to log LLOC (conditional), and alone within each
//! LLOC quartile stratum. A sign flip between marginal and conditional with
//! both intervals excluding zero is reported as a reversal.

mod simpson;
mod strata;

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Dimension;
use crate::features::{build_features, FeatureColumn, FeatureError, LabeledInstance, ScalingMode};
use crate::ml::{fit_logistic, CoefficientEstimate, MlError};

pub use simpson::{generate_simpson_corpus, SimpsonParams};
pub use strata::{quartile_strata, quartiles, StratificationScheme};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least {needed} instances, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("{0} association is not estimable: {1}")]
    Inestimable(&'static str, String),
    #[error("need at least 2 models to compare, got {0}")]
    TooFewModels(usize),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which covariates accompany log CE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    Marginal,
    OnLloc,
}

/// One CE coefficient, or the reason it could not be estimated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Association {
    pub n: usize,
    pub n_positive: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<CoefficientEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inestimable: Option<String>,
}

impl Association {
    fn failed(n: usize, n_positive: usize, reason: String) -> Self {
        log::warn!("association inestimable (n = {n}): {reason}");
        Association { n, n_positive, estimate: None, inestimable: Some(reason) }
    }

    pub fn coef(&self) -> Option<f64> {
        self.estimate.as_ref().map(|e| e.coef)
    }
}

/// Logistic coefficient of standardized log CE on the label. Features are
/// standardized on the analyzed subset itself.
pub fn association(instances: &[LabeledInstance], conditioning: Conditioning) -> Association {
    let n = instances.len();
    let n_positive = instances.iter().filter(|i| i.label == 1).count();
    if n_positive == 0 || n_positive == n {
        return Association::failed(n, n_positive, "single-class subset".into());
    }
    let columns: &[FeatureColumn] = match conditioning {
        Conditioning::Marginal => &[FeatureColumn::LogCe],
        Conditioning::OnLloc => &[FeatureColumn::LogCe, FeatureColumn::LogLloc],
    };
    let features = match build_features(instances, columns, ScalingMode::Global, &[]) {
        Ok(f) => f,
        Err(e @ (FeatureError::ZeroSpread(_) | FeatureError::EmptySubset)) => {
            return Association::failed(n, n_positive, e.to_string())
        }
        Err(e) => return Association::failed(n, n_positive, e.to_string()),
    };
    let y: Vec<u8> = instances.iter().map(|i| i.label).collect();
    let names: Vec<&str> = columns.iter().map(|c| c.name()).collect();
    match fit_logistic(&features.values, &y, &names) {
        Ok(fit) if fit.converged => Association {
            n,
            n_positive,
            estimate: fit.term(FeatureColumn::LogCe.name()).cloned(),
            inestimable: None,
        },
        Ok(_) => Association::failed(n, n_positive, MlError::NotConverged.to_string()),
        Err(e) => Association::failed(n, n_positive, e.to_string()),
    }
}

/// CE association within each stratum, in stratum order.
pub fn stratified_association(instances: &[LabeledInstance], scheme: &StratificationScheme) -> Vec<Association> {
    (0..scheme.n_strata())
        .map(|s| {
            let subset: Vec<LabeledInstance> = instances
                .iter()
                .zip(&scheme.assignments)
                .filter(|(_, &a)| a == s)
                .map(|(i, _)| i.clone())
                .collect();
            association(&subset, Conditioning::Marginal)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reversal {
    pub reversal: bool,
    pub narrative: String,
}

fn sign_word(x: f64) -> &'static str {
    if x > 0.0 {
        "positive"
    } else if x < 0.0 {
        "negative"
    } else {
        "zero"
    }
}

/// A reversal needs opposite signs and both 95% intervals excluding zero.
pub fn detect_reversal(marginal: &Association, conditional: &Association) -> Result<Reversal, AnalysisError> {
    let m = marginal
        .estimate
        .as_ref()
        .ok_or_else(|| AnalysisError::Inestimable("marginal", marginal.inestimable.clone().unwrap_or_default()))?;
    let c = conditional
        .estimate
        .as_ref()
        .ok_or_else(|| AnalysisError::Inestimable("conditional", conditional.inestimable.clone().unwrap_or_default()))?;
    let flipped = m.coef.signum() != c.coef.signum() && m.coef != 0.0 && c.coef != 0.0;
    let both_clear = m.ci_excludes_zero() && c.ci_excludes_zero();
    let reversal = flipped && both_clear;
    let describe = |e: &CoefficientEstimate| {
        format!("{} ({:.4}, 95% CI [{:.4}, {:.4}])", sign_word(e.coef), e.coef, e.ci_low, e.ci_high)
    };
    let verdict = if reversal {
        "the association reverses once LLOC is controlled for, consistent with confounding by size"
    } else if flipped {
        "the sign flips, but at least one interval includes zero, so no reversal is claimed"
    } else {
        "no reversal"
    };
    Ok(Reversal {
        reversal,
        narrative: format!("marginal CE coefficient {}; conditional on LLOC {}: {verdict}", describe(m), describe(c)),
    })
}

/// Models whose conditional CE sign disagrees with the majority sign.
/// Inestimable models are ignored; a tied vote flags nobody.
pub fn flag_inverted_models(conditional: &BTreeMap<String, Association>) -> Result<Vec<String>, AnalysisError> {
    if conditional.len() < 2 {
        return Err(AnalysisError::TooFewModels(conditional.len()));
    }
    let signs: Vec<(&String, f64)> = conditional
        .iter()
        .filter_map(|(id, a)| a.coef().filter(|c| *c != 0.0).map(|c| (id, c.signum())))
        .collect();
    let positive = signs.iter().filter(|(_, s)| *s > 0.0).count();
    let negative = signs.len() - positive;
    if positive == negative {
        log::warn!("no majority sign among {} models; nothing flagged", signs.len());
        return Ok(Vec::new());
    }
    let majority = if positive > negative { 1.0 } else { -1.0 };
    Ok(signs.into_iter().filter(|(_, s)| *s != majority).map(|(id, _)| id.clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub dimension: Dimension,
    pub strata: BTreeMap<String, StratificationScheme>,
    pub marginal: BTreeMap<String, Association>,
    pub conditional: BTreeMap<String, Association>,
    pub per_stratum: BTreeMap<String, Vec<Association>>,
    pub reversal: BTreeMap<String, Option<Reversal>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverted_models: Option<Vec<String>>,
}

/// Full analysis over one or more models' labeled instances.
pub fn analyze(dimension: Dimension, models: &[(String, Vec<LabeledInstance>)]) -> Result<AnalysisReport, AnalysisError> {
    let mut report = AnalysisReport {
        dimension,
        strata: BTreeMap::new(),
        marginal: BTreeMap::new(),
        conditional: BTreeMap::new(),
        per_stratum: BTreeMap::new(),
        reversal: BTreeMap::new(),
        inverted_models: None,
    };
    for (model, instances) in models {
        let lloc: Vec<usize> = instances.iter().map(|i| i.lloc).collect();
        let scheme = quartile_strata(&lloc)?;
        let marginal = association(instances, Conditioning::Marginal);
        let conditional = association(instances, Conditioning::OnLloc);
        let reversal = match detect_reversal(&marginal, &conditional) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("model {model}: {e}");
                None
            }
        };
        report.per_stratum.insert(model.clone(), stratified_association(instances, &scheme));
        report.strata.insert(model.clone(), scheme);
        report.marginal.insert(model.clone(), marginal);
        report.conditional.insert(model.clone(), conditional);
        report.reversal.insert(model.clone(), reversal);
    }
    if models.len() >= 2 {
        report.inverted_models = Some(flag_inverted_models(&report.conditional)?);
    }
    Ok(report)
}

pub const STRATA_HEADER: [&str; 12] = [
    "model_id", "stratum", "lloc_low", "lloc_high", "n", "n_positive", "coef", "std_err", "z", "p_value", "ci_low", "ci_high",
];

/// Per-stratum coefficients, one row per (model, stratum), 6 decimals.
pub fn write_strata_csv<W: Write>(writer: W, report: &AnalysisReport) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(STRATA_HEADER)?;
    let f = |x: f64| format!("{x:.6}");
    for (model, entries) in &report.per_stratum {
        let scheme = &report.strata[model];
        for (s, a) in entries.iter().enumerate() {
            let (lo, hi) = scheme.bounds(s);
            let mut row = vec![model.clone(), (s + 1).to_string(), f(lo), f(hi), a.n.to_string(), a.n_positive.to_string()];
            match &a.estimate {
                Some(e) => row.extend([e.coef, e.std_err, e.z, e.p_value, e.ci_low, e.ci_high].map(f)),
                None => row.extend(std::iter::repeat_n(String::new(), 6)),
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
