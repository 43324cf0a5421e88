//! Monte Carlo simulation of additive functionals and normality diagnostics.

mod normality;
mod profile_mc;
mod simulate;
mod stats;

pub use normality::{normality_report, Check, NormalityReport, PredictionSource};
pub use profile_mc::{estimate_toll_decay, expected_toll_profile_mc, DecayPoint, DecayReport};
pub use simulate::{
    simulate, simulate_inspected, worker_rng, HistogramPlan, Inspector, SimConfig, DEFAULT_BUDGET, PILOT_STREAM,
};
pub use stats::{Histogram, HistogramSpec, SampleStats, SeedEntry};
