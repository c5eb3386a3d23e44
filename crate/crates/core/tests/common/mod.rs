use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson's statistic against the uniform law and whether it stays below
/// the critical value at `alpha`.
pub fn uniform_at(counts: &[u64], alpha: f64) -> (f64, bool) {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((counts.len() - 1) as f64).unwrap().inverse_cdf(1.0 - alpha);
    (stat, stat <= critical)
}
