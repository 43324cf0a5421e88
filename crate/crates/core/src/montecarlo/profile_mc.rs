//! Monte Carlo estimates of `E f(T_m)` and `E|f(T_m)|` on a grid of sizes.

use serde::Serialize;

use crate::constants::{ExpectedTollProfile, ProfileEntry, Provenance};
use crate::error::{invalid, Result};
use crate::functional::{Evaluator, TollSpec};
use crate::model::Model;
use crate::tree::{grow, EnumerationLimits};

use super::simulate::worker_rng;
use super::stats::SampleStats;

/// Samples of the root toll `f(T_m)` for each size, each size on its own stream.
fn root_toll_samples(
    model: &Model,
    toll: &TollSpec,
    sizes: &[usize],
    samples: u64,
    seed: u64,
    abs: bool,
) -> Result<Vec<SampleStats>> {
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    let mut ev = Evaluator::new(toll);
    sizes
        .iter()
        .map(|&m| {
            if m == 0 {
                return Err(invalid("sizes must be at least 1"));
            }
            let mut rng = worker_rng(seed, m as u64);
            let mut stats = SampleStats::new(m);
            for _ in 0..samples {
                let t = grow(model, m, &mut rng)?;
                ev.eval(&t)?;
                let f = ev.contributions()[0];
                stats.push(if abs { f.abs() } else { f });
            }
            Ok(stats)
        })
        .collect()
}

/// `E f(T_m)` for `m = 1..=max_size`: exact by enumeration up to
/// `exact_cutoff` (and for size-only tolls), Monte Carlo beyond. Size `m`
/// uses stream `m` of `seed`.
pub fn expected_toll_profile_mc(
    model: &Model,
    toll: &TollSpec,
    max_size: usize,
    samples: u64,
    seed: u64,
    exact_cutoff: usize,
) -> Result<ExpectedTollProfile> {
    let limits = EnumerationLimits::default();
    if toll.meta().size_only {
        return ExpectedTollProfile::exact(model, toll, max_size, &limits);
    }
    let cutoff = exact_cutoff.min(max_size).min(limits.max_size(model));
    let mut profile = ExpectedTollProfile::exact(model, toll, cutoff, &limits)?;
    let sizes: Vec<usize> = (cutoff + 1..=max_size).collect();
    for s in root_toll_samples(model, toll, &sizes, samples, seed, false)? {
        profile.entries.push(ProfileEntry {
            size: s.n,
            value: s.mean,
            provenance: Provenance::Mc { samples: s.count, std_error: s.std_error_of_mean() },
        });
    }
    Ok(profile)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayPoint {
    pub size: usize,
    pub mean_abs: f64,
    pub std_error: f64,
}

/// Measured decay of `E|f(T_k)|`; advisory, it cannot prove summability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub model: Model,
    pub toll: String,
    pub samples: u64,
    pub seed: u64,
    pub points: Vec<DecayPoint>,
    /// Least-squares slope of `log E|f|` against `log k` over positive points.
    pub log_log_slope: Option<f64>,
    /// Whether the estimates never increase by more than two standard errors.
    pub decreasing: bool,
}

pub fn estimate_toll_decay(
    model: &Model,
    toll: &TollSpec,
    sizes: &[usize],
    samples: u64,
    seed: u64,
) -> Result<DecayReport> {
    let stats = root_toll_samples(model, toll, sizes, samples, seed, true)?;
    let points: Vec<DecayPoint> = stats
        .iter()
        .map(|s| DecayPoint { size: s.n, mean_abs: s.mean, std_error: s.std_error_of_mean() })
        .collect();
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.mean_abs > 0.0)
        .map(|p| ((p.size as f64).ln(), p.mean_abs.ln()))
        .collect();
    let log_log_slope = (logs.len() >= 2).then(|| {
        let k = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let mut sorted = points.clone();
    sorted.sort_by_key(|p| p.size);
    let decreasing = sorted.windows(2).all(|w| {
        w[1].mean_abs <= w[0].mean_abs + 2.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt()
    });
    Ok(DecayReport {
        model: *model,
        toll: toll.to_string(),
        samples,
        seed,
        points,
        log_log_slope: log_log_slope.filter(|s| s.is_finite()),
        decreasing,
    })
}
