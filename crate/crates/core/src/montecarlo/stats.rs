//! Streaming moment accumulators and fixed-bin histograms.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Bin layout: `bins` bins of equal `width` starting at `lo`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub lo: f64,
    pub width: f64,
    pub bins: usize,
}

impl HistogramSpec {
    pub fn new(lo: f64, width: f64, bins: usize) -> Result<Self> {
        if !(lo.is_finite() && width.is_finite() && width > 0.0 && bins > 0) {
            return Err(invalid("histogram needs a finite start, positive width and at least one bin"));
        }
        Ok(HistogramSpec { lo, width, bins })
    }

    /// Roughly `bins` bins over `center +- half_width`. With a lattice spacing
    /// `h`, the width is a multiple of `h` and every edge sits halfway between
    /// two lattice points, so the binned CDF is exact at the edges.
    pub fn centered(center: f64, half_width: f64, bins: usize, lattice: Option<f64>) -> Result<Self> {
        if half_width.is_nan() || half_width <= 0.0 || bins == 0 {
            return Err(invalid("histogram needs a positive half width and at least one bin"));
        }
        let target = 2.0 * half_width / bins as f64;
        match lattice {
            Some(h) if h > 0.0 => {
                let width = h * (target / h).round().max(1.0);
                let half_bins = (half_width / width).ceil() as i64;
                let mid = (center / h).round();
                let lo = (mid + 0.5) * h - half_bins as f64 * width;
                Self::new(lo, width, 2 * half_bins as usize)
            }
            _ => Self::new(center - half_width, target, bins),
        }
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.width
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub spec: HistogramSpec,
    pub counts: Vec<u64>,
    /// Values below `lo`.
    pub below: u64,
    /// Values at or above the last edge.
    pub above: u64,
}

impl Histogram {
    pub fn new(spec: HistogramSpec) -> Self {
        Histogram { spec, counts: vec![0; spec.bins], below: 0, above: 0 }
    }

    pub fn push(&mut self, x: f64) {
        let t = ((x - self.spec.lo) / self.spec.width).floor();
        if t < 0.0 {
            self.below += 1;
        } else if t >= self.spec.bins as f64 {
            self.above += 1;
        } else {
            self.counts[t as usize] += 1;
        }
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.spec != other.spec {
            return Err(invalid("cannot merge histograms with different bins"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.below + self.above + self.counts.iter().sum::<u64>()
    }

    /// Empirical CDF at every edge, `F(edge_0) .. F(edge_bins)`.
    pub fn cdf_at_edges(&self) -> Vec<f64> {
        let n = self.total() as f64;
        let mut acc = self.below;
        let mut out = Vec::with_capacity(self.counts.len() + 1);
        out.push(acc as f64 / n);
        for &c in &self.counts {
            acc += c;
            out.push(acc as f64 / n);
        }
        out
    }
}

/// Seed and stream used by one worker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub worker: usize,
    pub seed: u64,
    pub stream: u64,
    pub samples: u64,
}

/// One-pass central moments up to order four, mergeable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    /// Tree size.
    pub n: usize,
    pub count: u64,
    pub mean: f64,
    /// Sums of powers of deviations from the mean.
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Option<Histogram>,
    pub seed_manifest: Vec<SeedEntry>,
    /// The first few sample values, if requested.
    pub values: Option<Vec<f64>>,
}

impl SampleStats {
    pub fn new(n: usize) -> Self {
        SampleStats {
            n,
            count: 0,
            mean: 0.0,
            m2: 0.0,
            m3: 0.0,
            m4: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            histogram: None,
            seed_manifest: Vec::new(),
            values: None,
        }
    }

    pub fn with_histogram(mut self, spec: HistogramSpec) -> Self {
        self.histogram = Some(Histogram::new(spec));
        self
    }

    pub fn from_values(n: usize, values: &[f64]) -> Self {
        let mut s = Self::new(n);
        values.iter().for_each(|&x| s.push(x));
        s
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term1;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
        if let Some(h) = &mut self.histogram {
            h.push(x);
        }
    }

    /// Combines with the statistics of a disjoint sample.
    pub fn merge(&mut self, other: &SampleStats) -> Result<()> {
        if other.count == 0 {
            return self.merge_extras(other);
        }
        if self.count == 0 {
            let (hist, manifest, values) =
                (self.histogram.take(), std::mem::take(&mut self.seed_manifest), self.values.take());
            let n = self.n;
            *self = other.clone();
            self.n = n;
            self.histogram = hist;
            self.seed_manifest = manifest;
            self.values = values;
            return self.merge_extras(other);
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;
        let (a2, a3, b2, b3) = (self.m2, self.m3, other.m2, other.m3);
        self.m4 += other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * b2 + nb * nb * a2) / (n * n)
            + 4.0 * delta * (na * b3 - nb * a3) / n;
        self.m3 += b3 + d3 * na * nb * (na - nb) / (n * n) + 3.0 * delta * (na * b2 - nb * a2) / n;
        self.m2 += b2 + d2 * na * nb / n;
        self.mean += delta * nb / n;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
        self.merge_extras(other)
    }

    fn merge_extras(&mut self, other: &SampleStats) -> Result<()> {
        match (&mut self.histogram, &other.histogram) {
            (Some(a), Some(b)) => a.merge(b)?,
            (None, Some(b)) if self.count == other.count => self.histogram = Some(b.clone()),
            _ => {}
        }
        self.seed_manifest.extend_from_slice(&other.seed_manifest);
        if let Some(v) = &other.values {
            self.values.get_or_insert_with(Vec::new).extend_from_slice(v);
        }
        Ok(())
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_error_of_mean(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    /// Sample skewness `sqrt(N) m3 / m2^1.5`; zero for a degenerate sample.
    pub fn skewness(&self) -> f64 {
        if self.m2 <= 0.0 {
            return 0.0;
        }
        (self.count as f64).sqrt() * self.m3 / self.m2.powf(1.5)
    }

    /// Sample excess kurtosis `N m4 / m2^2 - 3`; zero for a degenerate sample.
    pub fn excess_kurtosis(&self) -> f64 {
        if self.m2 <= 0.0 {
            return 0.0;
        }
        self.count as f64 * self.m4 / (self.m2 * self.m2) - 3.0
    }

    /// Approximate standard error of the sample variance.
    pub fn std_error_of_variance(&self) -> f64 {
        let n = self.count as f64;
        if self.count < 2 {
            return 0.0;
        }
        let v = self.m2 / n;
        ((self.m4 / n - v * v).max(0.0) / n).sqrt()
    }
}
