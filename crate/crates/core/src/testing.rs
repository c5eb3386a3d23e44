use statrs::distribution::{ChiSquared, ContinuousCDF};

/// The statistic and critical value show up in assertion messages.
#[derive(Debug)]
#[allow(dead_code)]
pub struct ChiSquare {
    pub statistic: f64,
    pub critical: f64,
    pub passes: bool,
}

/// Pearson's test of observed counts against the uniform law.
pub fn chi_square_uniform(counts: &[u64], alpha: f64) -> ChiSquare {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((counts.len() - 1) as f64).unwrap().inverse_cdf(1.0 - alpha);
    ChiSquare { statistic, critical, passes: statistic <= critical }
}
