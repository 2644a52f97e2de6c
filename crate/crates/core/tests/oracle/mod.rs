//! Independent, deliberately naive re-derivations used as test oracles:
//! plain gradient ascent for logistic coefficients, a finite-difference
//! Hessian for their standard errors, and pairwise counting for ROC AUC.
#![allow(dead_code)]

pub fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Gradient of the mean log-likelihood; column 0 of `x` is the intercept.
pub fn gradient(x: &[Vec<f64>], y: &[f64], beta: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let mut g = vec![0.0; beta.len()];
    for (row, &yi) in x.iter().zip(y) {
        let eta: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
        let r = yi - sigmoid(eta);
        for (gj, xj) in g.iter_mut().zip(row) {
            *gj += r * xj / n;
        }
    }
    g
}

pub fn gradient_ascent(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let mut beta = vec![0.0; x[0].len()];
    for _ in 0..2_000_000 {
        let g = gradient(x, y, &beta);
        if g.iter().all(|v| v.abs() < 1e-12) {
            break;
        }
        for (b, gj) in beta.iter_mut().zip(&g) {
            *b += 2.0 * gj;
        }
    }
    beta
}

/// Inverse by Gauss-Jordan with partial pivoting.
pub fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        inv.swap(c, p);
        let d = a[c][c];
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] -= f * a[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    inv
}

/// Standard errors from a central-difference Hessian of the total
/// log-likelihood.
pub fn numeric_std_errors(x: &[Vec<f64>], y: &[f64], beta: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let h = 1e-5;
    let k = beta.len();
    let mut hess = vec![vec![0.0; k]; k];
    for j in 0..k {
        let (mut up, mut down) = (beta.to_vec(), beta.to_vec());
        up[j] += h;
        down[j] -= h;
        let (gu, gd) = (gradient(x, y, &up), gradient(x, y, &down));
        for i in 0..k {
            hess[i][j] = -(gu[i] - gd[i]) * n / (2.0 * h);
        }
    }
    invert(hess).iter().enumerate().map(|(i, row)| row[i].sqrt()).collect()
}

pub fn brute_auc(y: &[u8], s: &[f64]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1.0;
                wins += if s[i] > s[j] {
                    1.0
                } else if s[i] == s[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    wins / pairs
}
