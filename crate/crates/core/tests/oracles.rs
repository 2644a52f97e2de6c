//! Independent re-derivations checked against the library.

use cemaint_core::analysis::{association, generate_simpson_corpus, quartile_strata, stratified_association, Conditioning, SimpsonParams};
use cemaint_core::corpus::Dimension;
use cemaint_core::features::LabeledInstance;
use cemaint_core::ml::{fit_logistic, roc_auc};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod oracle;

use oracle::{brute_auc, gradient_ascent, numeric_std_errors, sigmoid};

fn dataset(seed: u64, n: usize) -> (DMatrix<f64>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let x = DMatrix::from_column_slice(n, 2, &data);
    let y = (0..n)
        .map(|i| u8::from(rng.random::<f64>() < sigmoid(-0.4 + 0.9 * x[(i, 0)] - 0.6 * x[(i, 1)])))
        .collect();
    (x, y)
}

#[test]
fn irls_matches_gradient_ascent_and_numeric_hessian() {
    for seed in [1, 2, 3] {
        let (x, y) = dataset(seed, 250);
        let fit = fit_logistic(&x, &y, &["a", "b"]).unwrap();
        let rows: Vec<Vec<f64>> = (0..x.nrows()).map(|i| vec![1.0, x[(i, 0)], x[(i, 1)]]).collect();
        let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let oracle = gradient_ascent(&rows, &yf);
        let se = numeric_std_errors(&rows, &yf, &oracle);
        for (k, e) in fit.estimates.iter().enumerate() {
            assert!((e.coef - oracle[k]).abs() < 1e-5, "seed {seed} coef {k}: {} vs {}", e.coef, oracle[k]);
            assert!((e.std_err - se[k]).abs() < 1e-5, "seed {seed} se {k}: {} vs {}", e.std_err, se[k]);
        }
    }
}

#[test]
fn auc_is_the_pairwise_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let y: Vec<u8> = (0..200).map(|_| u8::from(rng.random::<bool>())).collect();
    let s: Vec<f64> = (0..200).map(|_| f64::from(rng.random_range(0..40u8)) / 40.0).collect();
    assert_eq!(roc_auc(&y, &s).unwrap(), brute_auc(&y, &s));
}

#[test]
fn simpson_panel_reverses_for_every_seed() {
    let params = SimpsonParams::default();
    for seed in 0..20 {
        let corpus = generate_simpson_corpus(seed, 1000, &params);
        let m = association(&corpus, Conditioning::Marginal).estimate.unwrap();
        let c = association(&corpus, Conditioning::OnLloc).estimate.unwrap();
        assert!(m.coef > 0.0 && m.ci_low > 0.0, "seed {seed} marginal {m:?}");
        assert!(c.coef < 0.0 && c.ci_high < 0.0, "seed {seed} conditional {c:?}");
    }
}

#[test]
fn ce_independent_within_strata_gives_null_intervals() {
    // Label depends on size only; CE is pure noise. Each stratum interval
    // should contain zero about 95% of the time.
    let (mut covering, mut total) = (0, 0);
    for seed in 0..25 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instances: Vec<LabeledInstance> = (0..600)
            .map(|i| {
                let lloc = rng.random_range(2..2000usize);
                let ce = rng.random_range(0.3..3.0);
                let label = u8::from(rng.random::<f64>() < sigmoid(1.5 * ((lloc as f64).ln() - 5.5)));
                LabeledInstance::new(format!("F{i}"), lloc, ce, label, Dimension::Ov).unwrap()
            })
            .collect();
        let lloc: Vec<usize> = instances.iter().map(|i| i.lloc).collect();
        let scheme = quartile_strata(&lloc).unwrap();
        for a in stratified_association(&instances, &scheme) {
            let e = a.estimate.unwrap();
            total += 1;
            covering += usize::from(e.ci_low < 0.0 && e.ci_high > 0.0);
        }
    }
    assert_eq!(total, 100);
    assert!(covering >= 88, "{covering}/100 intervals contain zero");
}
