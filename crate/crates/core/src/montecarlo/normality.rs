//! Normality diagnostics of a sample of `F(T_n)` against the limit theorems.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::constants::{Method, TheoremConstants, Truncation};

use super::stats::SampleStats;

/// Observed value against a prediction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Check {
    pub observed: f64,
    pub predicted: f64,
    pub std_error: f64,
    pub z_score: f64,
}

impl Check {
    fn new(observed: f64, predicted: f64, std_error: f64) -> Self {
        let z_score = if std_error > 0.0 {
            (observed - predicted) / std_error
        } else if observed == predicted {
            0.0
        } else {
            f64::INFINITY.copysign(observed - predicted)
        };
        Check { observed, predicted, std_error, z_score }
    }
}

/// Where the predictions came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionSource {
    pub method: Method,
    pub truncation: Truncation,
    pub mu: f64,
    pub sigma2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalityReport {
    pub n: usize,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub variance_per_n: f64,
    pub skewness: f64,
    pub skewness_std_error: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_std_error: f64,
    /// Largest gap between the binned empirical CDF of the standardized
    /// sample and the standard normal CDF; needs a histogram.
    pub ks_statistic: Option<f64>,
    pub mean_check: Option<Check>,
    pub variance_check: Option<Check>,
    /// `(variance / n) / sigma^2`.
    pub variance_ratio: Option<f64>,
    /// The sample (or the predicted `sigma^2`) is degenerate; the normal limit
    /// does not apply.
    pub sigma_zero: bool,
    pub prediction: Option<PredictionSource>,
}

/// Skewness, excess kurtosis, binned KS distance and, given constants, the
/// mean and variance checks against `mu n + c mu` and `sigma^2 n`.
pub fn normality_report(stats: &SampleStats, constants: Option<&TheoremConstants>) -> NormalityReport {
    let count = stats.count as f64;
    let n = stats.n as f64;
    let variance = stats.variance();
    let predicted_sigma2 = constants.and_then(|c| c.sigma2);
    let sigma_zero = variance <= 1e-12 * stats.mean.abs().max(1.0) || predicted_sigma2.is_some_and(|s| s.abs() < 1e-12);
    let ks_statistic = stats.histogram.as_ref().filter(|_| variance > 0.0).map(|h| {
        let sd = variance.sqrt();
        let normal = Normal::standard();
        h.cdf_at_edges()
            .iter()
            .enumerate()
            .map(|(i, &f)| (f - normal.cdf((h.spec.edge(i) - stats.mean) / sd)).abs())
            .fold(0.0, f64::max)
    });
    let mean_check = constants.map(|c| Check::new(stats.mean, c.predicted_mean(stats.n), stats.std_error_of_mean()));
    let variance_check = predicted_sigma2.map(|s| Check::new(variance, s * n, stats.std_error_of_variance()));
    NormalityReport {
        n: stats.n,
        samples: stats.count,
        mean: stats.mean,
        variance,
        variance_per_n: variance / n,
        skewness: stats.skewness(),
        skewness_std_error: (6.0 / count).sqrt(),
        excess_kurtosis: stats.excess_kurtosis(),
        kurtosis_std_error: (24.0 / count).sqrt(),
        ks_statistic,
        mean_check,
        variance_check,
        variance_ratio: predicted_sigma2.filter(|&s| s != 0.0).map(|s| variance / n / s),
        sigma_zero,
        prediction: constants.map(|c| PredictionSource {
            method: c.method,
            truncation: c.truncation,
            mu: c.mu,
            sigma2: c.sigma2,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::stats::HistogramSpec;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn calibration_on_normal_sample() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut stats = SampleStats::new(1).with_histogram(HistogramSpec::centered(0.0, 6.0, 201, None).unwrap());
        for _ in 0..100_000 {
            let x: f64 = StandardNormal.sample(&mut rng);
            stats.push(x);
        }
        let r = normality_report(&stats, None);
        assert!(r.skewness.abs() < 4.0 * r.skewness_std_error);
        assert!(r.excess_kurtosis.abs() < 4.0 * r.kurtosis_std_error);
        assert!(r.ks_statistic.unwrap() < 0.01);
        assert!(!r.sigma_zero);
    }

    #[test]
    fn degenerate_sample_is_flagged() {
        let stats = SampleStats::from_values(10, &[10.0; 20]);
        let r = normality_report(&stats, None);
        assert!(r.sigma_zero);
        assert_eq!((r.skewness, r.excess_kurtosis), (0.0, 0.0));
    }
}
