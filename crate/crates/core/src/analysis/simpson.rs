//! Synthetic instances with a built-in Simpson reversal: larger files have
//! lower CE and are less often rated positively, so CE looks positively
//! associated with the label overall while, at fixed size, higher CE lowers
//! the label probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::Dimension;
use crate::features::LabeledInstance;
use crate::ml::logistic::sigmoid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpsonParams {
    /// Mean and sd of log LLOC.
    pub log_lloc_mean: f64,
    pub log_lloc_sd: f64,
    /// log CE = ce_intercept + ce_slope·(log LLOC − mean) + ce_noise·ε
    pub ce_intercept: f64,
    pub ce_slope: f64,
    pub ce_noise: f64,
    /// logit = label_intercept + size_effect·z(log LLOC) + residual_effect·ε
    pub label_intercept: f64,
    pub size_effect: f64,
    pub residual_effect: f64,
}

impl Default for SimpsonParams {
    fn default() -> Self {
        SimpsonParams {
            log_lloc_mean: 4.0,
            log_lloc_sd: 1.2,
            ce_intercept: 0.4,
            ce_slope: -0.3,
            ce_noise: 0.3,
            label_intercept: 0.3,
            size_effect: -2.0,
            residual_effect: -1.0,
        }
    }
}

/// Deterministic given `seed`. Labels are for [`Dimension::Ov`].
pub fn generate_simpson_corpus(seed: u64, n: usize, params: &SimpsonParams) -> Vec<LabeledInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = Normal::new(params.log_lloc_mean, params.log_lloc_sd).expect("valid sd");
    let noise = Normal::new(0.0, 1.0).expect("valid sd");

    let draws: Vec<(usize, f64)> = (0..n)
        .map(|_| {
            let lloc = size.sample(&mut rng).exp().round().max(1.0) as usize;
            (lloc, noise.sample(&mut rng))
        })
        .collect();
    let log_lloc: Vec<f64> = draws.iter().map(|(l, _)| (*l as f64).ln()).collect();
    let mean = log_lloc.iter().sum::<f64>() / n as f64;
    let sd = (log_lloc.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();

    draws
        .iter()
        .zip(&log_lloc)
        .enumerate()
        .map(|(i, (&(lloc, eps), &ll))| {
            let log_ce = params.ce_intercept + params.ce_slope * (ll - params.log_lloc_mean) + params.ce_noise * eps;
            let eta = params.label_intercept + params.size_effect * (ll - mean) / sd + params.residual_effect * eps;
            let label = u8::from(rng.random::<f64>() < sigmoid(eta));
            LabeledInstance::new(format!("synthetic/C{i:05}.java"), lloc, log_ce.exp(), label, Dimension::Ov)
                .expect("generated values are positive")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_corpus() {
        let p = SimpsonParams::default();
        assert_eq!(generate_simpson_corpus(3, 300, &p), generate_simpson_corpus(3, 300, &p));
        assert_ne!(generate_simpson_corpus(3, 300, &p), generate_simpson_corpus(4, 300, &p));
    }

    #[test]
    fn both_classes_and_positive_values() {
        let c = generate_simpson_corpus(1, 500, &SimpsonParams::default());
        let pos = c.iter().filter(|i| i.label == 1).count();
        assert!(pos > 100 && pos < 400, "{pos}");
        assert!(c.iter().all(|i| i.lloc >= 1 && i.ce > 0.0));
    }
}
