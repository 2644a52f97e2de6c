//! Unpenalized logistic regression with an intercept, fitted by
//! Newton-Raphson (IRLS), with Wald standard errors from the inverse observed
//! information.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::erf::erfc;

use super::MlError;

/// Stop once every score component is below this.
pub const SCORE_TOLERANCE: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 100;
/// Coefficients beyond this signal (quasi-)separation.
pub const DIVERGENCE_LIMIT: f64 = 1e4;
/// 97.5% standard normal quantile.
pub const Z_975: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientEstimate {
    pub term: String,
    pub coef: f64,
    pub std_err: f64,
    pub z: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CoefficientEstimate {
    fn wald(term: &str, coef: f64, std_err: f64) -> Self {
        let z = coef / std_err;
        CoefficientEstimate {
            term: term.to_string(),
            coef,
            std_err,
            z,
            p_value: erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0),
            ci_low: coef - Z_975 * std_err,
            ci_high: coef + Z_975 * std_err,
        }
    }

    /// True when the 95% interval lies entirely on one side of zero.
    pub fn ci_excludes_zero(&self) -> bool {
        self.ci_low > 0.0 || self.ci_high < 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticFit {
    /// `const` first, then one entry per feature column.
    pub estimates: Vec<CoefficientEstimate>,
    pub converged: bool,
    pub iterations: usize,
    pub log_likelihood: f64,
}

impl LogisticFit {
    pub fn coefficients(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.coef).collect()
    }

    pub fn term(&self, name: &str) -> Option<&CoefficientEstimate> {
        self.estimates.iter().find(|e| e.term == name)
    }

    pub fn n_features(&self) -> usize {
        self.estimates.len() - 1
    }

    fn linear_predictor(&self, row: impl Iterator<Item = f64>) -> f64 {
        let coefs = &self.estimates;
        coefs[0].coef + row.zip(&coefs[1..]).map(|(x, e)| x * e.coef).sum::<f64>()
    }
}

pub(crate) fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn with_intercept(x: &DMatrix<f64>) -> DMatrix<f64> {
    x.clone().insert_column(0, 1.0)
}

struct Step {
    p: DVector<f64>,
    score: DVector<f64>,
    information: DMatrix<f64>,
    log_likelihood: f64,
}

fn evaluate(design: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> Step {
    let eta = design * beta;
    let p = eta.map(sigmoid);
    let w = p.map(|pi| pi * (1.0 - pi));
    let score = design.transpose() * (y - &p);
    let weighted = DMatrix::from_fn(design.nrows(), design.ncols(), |i, j| design[(i, j)] * w[i]);
    let information = design.transpose() * weighted;
    // log(1 + e^eta) computed stably
    let log_likelihood = eta
        .iter()
        .zip(y.iter())
        .map(|(&e, &yi)| yi * e - (e.max(0.0) + (-e.abs()).exp().ln_1p()))
        .sum();
    Step {
        p,
        score,
        information,
        log_likelihood,
    }
}

/// Fits `logit P(y=1) = b0 + x·b`. `terms` names the columns of `x`.
pub fn fit_logistic(x: &DMatrix<f64>, y: &[u8], terms: &[&str]) -> Result<LogisticFit, MlError> {
    let n = x.nrows();
    if y.len() != n {
        return Err(MlError::LengthMismatch { expected: n, got: y.len() });
    }
    if terms.len() != x.ncols() {
        return Err(MlError::FeatureMismatch { expected: terms.len(), got: x.ncols() });
    }
    if n < 2 {
        return Err(MlError::TooFewRows(n));
    }
    let positives = y.iter().filter(|&&v| v == 1).count();
    if positives == 0 || positives == n {
        return Err(MlError::SingleClass);
    }

    let design = with_intercept(x);
    let yv = DVector::from_iterator(n, y.iter().map(|&v| f64::from(v)));
    let mut beta = DVector::zeros(design.ncols());
    let mut converged = false;
    let mut iterations = 0;
    let mut step = evaluate(&design, &yv, &beta);

    while iterations < MAX_ITERATIONS {
        if step.score.amax() < SCORE_TOLERANCE {
            converged = true;
            break;
        }
        let delta = step
            .information
            .clone()
            .cholesky()
            .ok_or(MlError::Singular)?
            .solve(&step.score);
        beta += delta;
        iterations += 1;
        if !beta.iter().all(|b| b.is_finite()) || beta.amax() > DIVERGENCE_LIMIT {
            return Err(MlError::Separation);
        }
        step = evaluate(&design, &yv, &beta);
    }
    if !converged && step.score.amax() < SCORE_TOLERANCE {
        converged = true;
    }

    // Perfectly fitted labels mean the likelihood has no finite maximum.
    let max_residual = yv.iter().zip(step.p.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if max_residual < 1e-6 {
        return Err(MlError::Separation);
    }

    let covariance = step.information.clone().cholesky().ok_or(MlError::Singular)?.inverse();
    let names = std::iter::once("const").chain(terms.iter().copied());
    let estimates = names
        .enumerate()
        .map(|(k, name)| CoefficientEstimate::wald(name, beta[k], covariance[(k, k)].sqrt()))
        .collect();
    if !converged {
        log::warn!("logistic regression did not converge in {MAX_ITERATIONS} iterations");
    }
    Ok(LogisticFit {
        estimates,
        converged,
        iterations,
        log_likelihood: step.log_likelihood,
    })
}

/// Probabilities and labels (`p > 0.5`) for each row of `x`.
pub fn predict_logistic(fit: &LogisticFit, x: &DMatrix<f64>) -> Result<(Vec<u8>, Vec<f64>), MlError> {
    if !fit.converged {
        return Err(MlError::NotConverged);
    }
    if x.ncols() != fit.n_features() {
        return Err(MlError::FeatureMismatch {
            expected: fit.n_features(),
            got: x.ncols(),
        });
    }
    let probs: Vec<f64> = x
        .row_iter()
        .map(|row| sigmoid(fit.linear_predictor(row.iter().copied())))
        .collect();
    let labels = probs.iter().map(|&p| u8::from(p > 0.5)).collect();
    Ok((labels, probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn prevalence_labels(ones: usize, zeros: usize) -> Vec<u8> {
        std::iter::repeat_n(1, ones).chain(std::iter::repeat_n(0, zeros)).collect()
    }

    #[test]
    fn intercept_only_recovers_logit_of_prevalence() {
        let y = prevalence_labels(174, 130);
        let x = DMatrix::zeros(304, 0);
        let fit = fit_logistic(&x, &y, &[]).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.estimates[0].coef, (174.0f64 / 130.0).ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(fit.estimates[0].coef, 0.291521, epsilon = 1e-6);
        // Var = 1/(n p (1-p))
        let p: f64 = 174.0 / 304.0;
        assert_abs_diff_eq!(fit.estimates[0].std_err, (1.0 / (304.0 * p * (1.0 - p))).sqrt(), epsilon = 1e-9);
        let (_, probs) = predict_logistic(&fit, &x).unwrap();
        assert!(probs.iter().all(|&q| (q - p).abs() < 1e-9));
    }

    #[test]
    fn wald_columns_are_consistent() {
        let e = CoefficientEstimate::wald("x", -0.7963, 0.306);
        assert_abs_diff_eq!(e.z, -0.7963 / 0.306, epsilon = 1e-12);
        assert_abs_diff_eq!(e.ci_low, -0.7963 - 1.959964 * 0.306, epsilon = 1e-6);
        assert_abs_diff_eq!(e.ci_high, -0.7963 + 1.959964 * 0.306, epsilon = 1e-6);
        // two-sided normal p for |z| = 1.959964 is 0.05
        let at_crit = CoefficientEstimate::wald("x", Z_975, 1.0);
        assert_abs_diff_eq!(at_crit.p_value, 0.05, epsilon = 1e-10);
        assert!(e.ci_excludes_zero());
    }

    #[test]
    fn separable_data_is_rejected() {
        let x = DMatrix::from_column_slice(6, 1, &[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
        let y = [0, 0, 0, 1, 1, 1];
        assert!(matches!(fit_logistic(&x, &y, &["x"]), Err(MlError::Separation)));
    }

    #[test]
    fn single_class_and_shape_errors() {
        let x = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(matches!(fit_logistic(&x, &[1, 1, 1], &["x"]), Err(MlError::SingleClass)));
        assert!(matches!(fit_logistic(&x, &[1, 0], &["x"]), Err(MlError::LengthMismatch { .. })));
        let fit = fit_logistic(
            &DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]),
            &[0, 1, 0, 1],
            &["x"],
        )
        .unwrap();
        let wrong = DMatrix::zeros(2, 2);
        assert!(matches!(predict_logistic(&fit, &wrong), Err(MlError::FeatureMismatch { .. })));
    }

    #[test]
    fn zero_coefficients_give_half_and_label_zero() {
        let fit = LogisticFit {
            estimates: vec![CoefficientEstimate::wald("const", 0.0, 1.0), CoefficientEstimate::wald("x", 0.0, 1.0)],
            converged: true,
            iterations: 0,
            log_likelihood: 0.0,
        };
        let x = DMatrix::from_column_slice(3, 1, &[-5.0, 0.0, 7.0]);
        let (labels, probs) = predict_logistic(&fit, &x).unwrap();
        assert_eq!(labels, [0, 0, 0]);
        assert!(probs.iter().all(|&p| p == 0.5));
    }

    #[test]
    fn monotone_in_positive_coefficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..200).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<u8> = xs
            .iter()
            .map(|&x| u8::from(rng.random::<f64>() < sigmoid(1.5 * x)))
            .collect();
        let fit = fit_logistic(&DMatrix::from_column_slice(200, 1, &xs), &y, &["x"]).unwrap();
        assert!(fit.estimates[1].coef > 0.0);
        let grid: Vec<f64> = (0..50).map(|i| -3.0 + i as f64 * 0.12).collect();
        let (_, probs) = predict_logistic(&fit, &DMatrix::from_column_slice(50, 1, &grid)).unwrap();
        assert!(probs.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn independent_label_slope_is_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..400).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<u8> = (0..400).map(|_| u8::from(rng.random::<bool>())).collect();
        let fit = fit_logistic(&DMatrix::from_column_slice(400, 1, &xs), &y, &["x"]).unwrap();
        let slope = &fit.estimates[1];
        assert!(slope.coef.abs() < 2.0 * slope.std_err, "{slope:?}");
    }

    #[test]
    fn score_equations_hold_at_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 150;
        let data: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x = DMatrix::from_column_slice(n, 2, &data);
        let y: Vec<u8> = (0..n)
            .map(|i| u8::from(rng.random::<f64>() < sigmoid(0.3 + x[(i, 0)] - 0.8 * x[(i, 1)])))
            .collect();
        let fit = fit_logistic(&x, &y, &["a", "b"]).unwrap();
        let (_, p) = predict_logistic(&fit, &x).unwrap();
        let design = with_intercept(&x);
        for j in 0..3 {
            let s: f64 = (0..n).map(|i| design[(i, j)] * (f64::from(y[i]) - p[i])).sum();
            assert!(s.abs() < 1e-6, "score[{j}] = {s}");
        }
    }
}
