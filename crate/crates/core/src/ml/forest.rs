//! CART classification trees (Gini) bagged into a random forest.
//!
//! Per node, features are visited in a random order and the search stops once
//! `max_features` non-constant features have been examined. Candidate
//! thresholds are midpoints between consecutive distinct values; samples go
//! left when `x <= threshold`. Among equally good splits the first one found
//! wins. Leaves store the class-1 fraction of their (bootstrap-weighted)
//! samples, and the forest averages these.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::MlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MaxFeatures {
    /// `max(1, floor(sqrt(p)))`
    Sqrt,
    All,
    Fixed(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        let k = match self {
            MaxFeatures::Sqrt => (n_features as f64).sqrt().floor() as usize,
            MaxFeatures::All => n_features,
            MaxFeatures::Fixed(k) => k.min(n_features),
        };
        k.max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf { p1: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { p1 } => return p1,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

struct Builder<'a> {
    x: &'a DMatrix<f64>,
    y: &'a [u8],
    max_features: usize,
    max_depth: Option<usize>,
    min_samples_split: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

impl Builder<'_> {
    /// Best split of `samples` on `feature`, or `None` if the feature is
    /// constant there.
    fn split_on(&self, samples: &[usize], feature: usize) -> Option<(f64, f64)> {
        let mut vals: Vec<(f64, u8)> = samples.iter().map(|&i| (self.x[(i, feature)], self.y[i])).collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        if vals[0].0 == vals[vals.len() - 1].0 {
            return None;
        }
        let n = vals.len();
        let total_pos = vals.iter().filter(|v| v.1 == 1).count();
        let mut left_pos = 0;
        let mut best: Option<(f64, f64)> = None;
        for i in 0..n - 1 {
            left_pos += usize::from(vals[i].1 == 1);
            if vals[i].0 == vals[i + 1].0 {
                continue;
            }
            let nl = i + 1;
            let nr = n - nl;
            let impurity = (nl as f64 * gini(left_pos, nl) + nr as f64 * gini(total_pos - left_pos, nr)) / n as f64;
            if best.is_none_or(|(b, _)| impurity < b) {
                let (lo, hi) = (vals[i].0, vals[i + 1].0);
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some((impurity, threshold));
            }
        }
        best
    }

    fn build(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let pos = samples.iter().filter(|&&i| self.y[i] == 1).count();
        self.nodes.push(Node::Leaf { p1: pos as f64 / samples.len() as f64 });

        let pure = pos == 0 || pos == samples.len();
        let too_deep = self.max_depth.is_some_and(|d| depth >= d);
        if pure || too_deep || samples.len() < self.min_samples_split {
            return id;
        }

        let mut features: Vec<usize> = (0..self.x.ncols()).collect();
        features.shuffle(&mut self.rng);
        let mut seen = 0;
        let mut best: Option<BestSplit> = None;
        for &f in &features {
            if seen >= self.max_features {
                break;
            }
            let Some((impurity, threshold)) = self.split_on(&samples, f) else {
                continue;
            };
            seen += 1;
            if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                best = Some(BestSplit { feature: f, threshold, impurity });
            }
        }
        let Some(best) = best else {
            return id;
        };

        let (left, right): (Vec<usize>, Vec<usize>) =
            samples.into_iter().partition(|&i| self.x[(i, best.feature)] <= best.threshold);
        let l = self.build(left, depth + 1);
        let r = self.build(right, depth + 1);
        self.nodes[id] = Node::Split { feature: best.feature, threshold: best.threshold, left: l, right: r };
        id
    }
}

fn fit_tree(x: &DMatrix<f64>, y: &[u8], params: &ForestParams, seed: u64) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x.nrows();
    let samples: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let mut b = Builder {
        x,
        y,
        max_features: params.max_features.resolve(x.ncols()),
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split.max(2),
        rng,
        nodes: Vec::new(),
    };
    b.build(samples, 0);
    Tree { nodes: b.nodes }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<Tree>,
    n_features: usize,
    /// Set when training labels had one class only.
    constant: Option<u8>,
}

pub fn fit_random_forest(
    x: &DMatrix<f64>,
    y: &[u8],
    params: &ForestParams,
    seed: u64,
) -> Result<RandomForest, MlError> {
    if y.len() != x.nrows() {
        return Err(MlError::LengthMismatch { expected: x.nrows(), got: y.len() });
    }
    if x.nrows() == 0 {
        return Err(MlError::TooFewRows(0));
    }
    if x.ncols() == 0 {
        return Err(MlError::FeatureMismatch { expected: 1, got: 0 });
    }
    if y.iter().all(|&v| v == y[0]) {
        log::warn!("random forest trained on a single class; predictions are constant");
        return Ok(RandomForest { trees: Vec::new(), n_features: x.ncols(), constant: Some(y[0]) });
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..params.n_trees.max(1)).map(|_| master.next_u64()).collect();
    let trees = seeds.into_par_iter().map(|s| fit_tree(x, y, params, s)).collect();
    Ok(RandomForest { trees, n_features: x.ncols(), constant: None })
}

impl RandomForest {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn predict_proba(&self, x: &DMatrix<f64>) -> Result<Vec<f64>, MlError> {
        if x.ncols() != self.n_features {
            return Err(MlError::FeatureMismatch { expected: self.n_features, got: x.ncols() });
        }
        if let Some(c) = self.constant {
            return Ok(vec![f64::from(c); x.nrows()]);
        }
        Ok(x.row_iter()
            .map(|row| {
                let row: Vec<f64> = row.iter().copied().collect();
                self.trees.iter().map(|t| t.predict_row(&row)).sum::<f64>() / self.trees.len() as f64
            })
            .collect())
    }

    /// Labels (`p > 0.5`) and probabilities.
    pub fn predict(&self, x: &DMatrix<f64>) -> Result<(Vec<u8>, Vec<f64>), MlError> {
        let probs = self.predict_proba(x)?;
        Ok((probs.iter().map(|&p| u8::from(p > 0.5)).collect(), probs))
    }
}
