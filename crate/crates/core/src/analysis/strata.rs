use serde::Serialize;

use super::AnalysisError;

/// Linear-interpolation quantile of sorted data (the default convention of
/// the common numeric libraries: position `q·(n−1)`).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 >= sorted.len() {
        return sorted[lo];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Q1, Q2, Q3 by linear interpolation.
pub fn quartiles(values: &[f64]) -> [f64; 3] {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    [0.25, 0.5, 0.75].map(|q| quantile_sorted(&sorted, q))
}

/// LLOC quartile bins: `[min,Q1]`, `(Q1,Q2]`, `(Q2,Q3]`, `(Q3,max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratificationScheme {
    pub min: f64,
    pub max: f64,
    /// Empty when LLOC is constant (one stratum).
    pub cut_points: Vec<f64>,
    #[serde(skip)]
    pub assignments: Vec<usize>,
    pub counts: Vec<usize>,
}

impl StratificationScheme {
    pub fn n_strata(&self) -> usize {
        self.cut_points.len() + 1
    }

    /// Lower and upper boundary of stratum `s`.
    pub fn bounds(&self, s: usize) -> (f64, f64) {
        let lo = if s == 0 { self.min } else { self.cut_points[s - 1] };
        let hi = self.cut_points.get(s).copied().unwrap_or(self.max);
        (lo, hi)
    }

    pub fn stratum_of(&self, lloc: f64) -> usize {
        self.cut_points.iter().take_while(|&&q| lloc > q).count()
    }
}

pub fn quartile_strata(lloc: &[usize]) -> Result<StratificationScheme, AnalysisError> {
    if lloc.len() < 4 {
        return Err(AnalysisError::TooFew { needed: 4, got: lloc.len() });
    }
    let values: Vec<f64> = lloc.iter().map(|&v| v as f64).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut_points = if min == max {
        log::warn!("LLOC is constant ({min}); using a single stratum");
        Vec::new()
    } else {
        quartiles(&values).to_vec()
    };
    let mut scheme = StratificationScheme { min, max, cut_points, assignments: Vec::new(), counts: Vec::new() };
    scheme.assignments = values.iter().map(|&v| scheme.stratum_of(v)).collect();
    scheme.counts = (0..scheme.n_strata()).map(|s| scheme.assignments.iter().filter(|&&a| a == s).count()).collect();
    Ok(scheme)
}
