//! Parallel sampling of `F(T_n)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functional::{Evaluator, TollSpec};
use crate::model::Model;
use crate::tree::grow;

use super::stats::{HistogramSpec, SampleStats, SeedEntry};

/// Default cap on `n * samples`, in inserted vertices.
pub const DEFAULT_BUDGET: u64 = 20_000_000_000;

/// Stream reserved for the pilot run that sizes an automatic histogram.
pub const PILOT_STREAM: u64 = u64::MAX;

const PILOT_SAMPLES: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HistogramPlan {
    None,
    Fixed { spec: HistogramSpec },
    /// Bins over `center +- 6 sd`, where `center` and `sd` come from the
    /// prediction if given, else from a pilot run on a separate stream.
    Auto { bins: usize, lattice: Option<f64>, center: Option<f64>, sd: Option<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: Model,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub histogram: HistogramPlan,
    /// Keep up to this many sample values (in worker order).
    pub keep_values: usize,
    /// Refuse runs with `n * samples` above this.
    pub budget: u64,
}

impl SimConfig {
    pub fn new(model: Model, n: usize, samples: u64, seed: u64) -> Self {
        SimConfig {
            model,
            n,
            samples,
            seed,
            workers: 1,
            histogram: HistogramPlan::None,
            keep_values: 0,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn histogram(mut self, plan: HistogramPlan) -> Self {
        self.histogram = plan;
        self
    }

    pub fn keep_values(mut self, cap: usize) -> Self {
        self.keep_values = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.n == 0 {
            return Err(invalid("tree size n must be at least 1"));
        }
        if self.samples == 0 {
            return Err(invalid("samples must be at least 1"));
        }
        if self.workers == 0 {
            return Err(invalid("workers must be at least 1"));
        }
        let work = (self.n as u64).saturating_mul(self.samples);
        if work > self.budget {
            return Err(Error::ResourceLimit(format!(
                "n * samples = {work} exceeds the budget of {} vertices",
                self.budget
            )));
        }
        Ok(())
    }
}

/// Called after each sampled tree with the evaluator state and `F`.
pub type Inspector<'a> = dyn Fn(&Evaluator<'_>, f64) -> std::result::Result<(), String> + Sync + 'a;

/// The RNG of worker `stream`: ChaCha8 keyed by `seed`, one stream per worker.
pub fn worker_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples `F(T_n)` `samples` times. Worker `w` draws from stream `w` of the
/// master seed and handles a contiguous share of the samples; results merge in
/// worker order, so output depends only on `(seed, workers)`.
pub fn simulate(cfg: &SimConfig, toll: &TollSpec) -> Result<SampleStats> {
    simulate_inspected(cfg, toll, None)
}

pub fn simulate_inspected(cfg: &SimConfig, toll: &TollSpec, inspector: Option<&Inspector<'_>>) -> Result<SampleStats> {
    cfg.validate()?;
    let mut manifest = Vec::new();
    let spec = match cfg.histogram {
        HistogramPlan::None => None,
        HistogramPlan::Fixed { spec } => Some(spec),
        HistogramPlan::Auto { bins, lattice, center, sd } => {
            let (center, sd) = match (center, sd) {
                (Some(c), Some(s)) if s > 0.0 => (c, s),
                _ => {
                    let pilot = run_worker(cfg, toll, PILOT_STREAM, PILOT_SAMPLES.min(cfg.samples), None, None, 0)?;
                    manifest.push(SeedEntry { worker: usize::MAX, seed: cfg.seed, stream: PILOT_STREAM, samples: pilot.count });
                    (pilot.mean, pilot.variance().sqrt())
                }
            };
            if sd > 0.0 {
                Some(HistogramSpec::centered(center, 6.0 * sd, bins, lattice)?)
            } else {
                None
            }
        }
    };
    let workers = cfg.workers.min(cfg.samples as usize).max(1);
    let share = |w: usize| cfg.samples / workers as u64 + u64::from((w as u64) < cfg.samples % workers as u64);
    let cap = |w: usize| {
        let before: u64 = (0..w).map(share).sum();
        (cfg.keep_values as u64).saturating_sub(before).min(share(w)) as usize
    };
    let results: Vec<Result<SampleStats>> = if workers == 1 {
        vec![run_worker(cfg, toll, 0, share(0), spec, inspector, cap(0))]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| scope.spawn(move || run_worker(cfg, toll, w as u64, share(w), spec, inspector, cap(w))))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut total = SampleStats::new(cfg.n);
    if let Some(s) = spec {
        total = total.with_histogram(s);
    }
    total.seed_manifest = manifest;
    if cfg.keep_values > 0 {
        total.values = Some(Vec::new());
    }
    for r in results {
        total.merge(&r?)?;
    }
    Ok(total)
}

fn run_worker(
    cfg: &SimConfig,
    toll: &TollSpec,
    stream: u64,
    samples: u64,
    spec: Option<HistogramSpec>,
    inspector: Option<&Inspector<'_>>,
    keep: usize,
) -> Result<SampleStats> {
    let mut rng = worker_rng(cfg.seed, stream);
    let mut stats = SampleStats::new(cfg.n);
    if let Some(s) = spec {
        stats = stats.with_histogram(s);
    }
    let mut values = Vec::with_capacity(keep);
    let mut ev = Evaluator::new(toll);
    for _ in 0..samples {
        let tree = grow(&cfg.model, cfg.n, &mut rng)?;
        let f = ev.eval(&tree)?;
        if let Some(check) = inspector {
            check(&ev, f).map_err(Error::Inspection)?;
        }
        stats.push(f);
        if values.len() < keep {
            values.push(f);
        }
    }
    if stream != PILOT_STREAM {
        stats.seed_manifest.push(SeedEntry { worker: stream as usize, seed: cfg.seed, stream, samples });
    }
    if keep > 0 {
        stats.values = Some(values);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_toll_is_deterministic() {
        let cfg = SimConfig::new(Model::Dary { d: 2 }, 100, 50, 1).workers(3);
        let s = simulate(&cfg, &TollSpec::constant(1.0).unwrap()).unwrap();
        assert_eq!((s.count, s.mean, s.min, s.max), (50, 100.0, 100.0, 100.0));
        assert_eq!(s.variance(), 0.0);
        assert_eq!(s.seed_manifest.len(), 3);
    }

    #[test]
    fn reproducible_for_fixed_seed_and_workers() {
        let cfg = SimConfig::new(Model::port(), 30, 200, 9)
            .workers(2)
            .keep_values(10)
            .histogram(HistogramPlan::Auto { bins: 21, lattice: Some(1.0), center: None, sd: None });
        let a = simulate(&cfg, &TollSpec::leaf()).unwrap();
        let b = simulate(&cfg, &TollSpec::leaf()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.values.as_ref().unwrap().len(), 10);
        assert_eq!(a.histogram.as_ref().unwrap().total(), 200);
    }

    #[test]
    fn budget_and_arguments_are_checked() {
        let mut cfg = SimConfig::new(Model::Dary { d: 2 }, 1000, 1000, 0);
        cfg.budget = 10;
        assert!(matches!(simulate(&cfg, &TollSpec::leaf()), Err(Error::ResourceLimit(_))));
        assert!(simulate(&SimConfig::new(Model::Dary { d: 2 }, 5, 0, 0), &TollSpec::leaf()).is_err());
        assert!(simulate(&SimConfig::new(Model::Dary { d: 2 }, 5, 1, 0).workers(0), &TollSpec::leaf()).is_err());
    }

    #[test]
    fn inspector_failures_abort() {
        let cfg = SimConfig::new(Model::Dary { d: 2 }, 10, 5, 0);
        let check = |_: &Evaluator<'_>, f: f64| if f > 0.0 { Err(format!("value {f}")) } else { Ok(()) };
        assert!(matches!(simulate_inspected(&cfg, &TollSpec::leaf(), Some(&check)), Err(Error::Inspection(_))));
    }
}
