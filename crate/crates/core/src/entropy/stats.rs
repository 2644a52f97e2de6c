use serde::Serialize;

/// Summary of per-file cross-entropies for one model.
///
/// Variance is the unbiased sample variance, skewness the adjusted
/// Fisher-Pearson G1 and kurtosis the adjusted excess G2 (the conventions of
/// the usual dataframe tooling). Fields that are undefined for the sample are
/// `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub mean: f64,
    pub variance: Option<f64>,
    pub kurtosis: Option<f64>,
    pub skewness: Option<f64>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

/// `None` for an empty slice.
pub fn describe(values: &[f64]) -> Option<DescriptiveStats> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let nf = n as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / nf;

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    let mut warnings = Vec::new();
    let variance = (n >= 2).then(|| m2 * nf / (nf - 1.0));
    let degenerate = variance.is_some_and(|v| v <= 0.0);
    if degenerate {
        warnings.push("zero variance: skewness and kurtosis undefined".to_string());
    }

    let skewness = (n >= 3 && !degenerate).then(|| {
        let g1 = m3 / m2.powf(1.5);
        (nf * (nf - 1.0)).sqrt() / (nf - 2.0) * g1
    });
    let kurtosis = (n >= 4 && !degenerate).then(|| {
        let g2 = m4 / (m2 * m2) - 3.0;
        (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)) * ((nf + 1.0) * g2 + 6.0)
    });

    for w in &warnings {
        log::warn!("{w}");
    }
    Some(DescriptiveStats {
        n,
        min,
        max,
        range: max - min,
        mean,
        variance,
        kurtosis,
        skewness,
        warnings,
    })
}
