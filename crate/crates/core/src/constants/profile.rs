//! Per-size expectations `E f(T_m)` of a toll.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functional::{Evaluator, TollSpec};
use crate::model::Model;
use crate::tree::{grow, EnumerationLimits, IncreasingTree};

use super::series::SizeAggregates;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    /// Exact expectation (full enumeration, or a size-only toll).
    Exact,
    /// Monte Carlo estimate.
    Mc { samples: u64, std_error: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub size: usize,
    pub value: f64,
    pub provenance: Provenance,
}

/// `E f(T_m)` for `m = 1..=M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedTollProfile {
    pub model: Model,
    pub toll: String,
    /// `sup |f|` if the toll is bounded under the model.
    pub sup_abs: Option<f64>,
    pub entries: Vec<ProfileEntry>,
}

impl ExpectedTollProfile {
    /// Exact profile up to `max_size`. Size-only tolls are evaluated on one tree
    /// per size, so any `max_size` works; otherwise every tree is enumerated.
    pub fn exact(model: &Model, toll: &TollSpec, max_size: usize, limits: &EnumerationLimits) -> Result<Self> {
        let values = if toll.meta().size_only {
            size_only_values(model, toll, max_size)?
        } else {
            let agg = SizeAggregates::collect(model, toll, max_size, limits)?;
            (1..=max_size).map(|m| agg.expected_toll(m)).collect()
        };
        Ok(ExpectedTollProfile {
            model: *model,
            toll: toll.to_string(),
            sup_abs: toll.sup_abs(model),
            entries: values
                .into_iter()
                .enumerate()
                .map(|(i, value)| ProfileEntry { size: i + 1, value, provenance: Provenance::Exact })
                .collect(),
        })
    }

    /// Builds a profile from explicit per-size values, all marked exact.
    pub fn from_exact_values(model: &Model, toll: &TollSpec, values: &[f64]) -> Self {
        ExpectedTollProfile {
            model: *model,
            toll: toll.to_string(),
            sup_abs: toll.sup_abs(model),
            entries: values
                .iter()
                .enumerate()
                .map(|(i, &value)| ProfileEntry { size: i + 1, value, provenance: Provenance::Exact })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_exact_upto(&self, n: usize) -> bool {
        n <= self.entries.len() && self.entries[..n].iter().all(|e| e.provenance == Provenance::Exact)
    }

    /// Entry for size `m`.
    pub fn get(&self, m: usize) -> Option<&ProfileEntry> {
        self.entries.get(m.checked_sub(1)?)
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if self.entries.len() < n {
            return Err(invalid(format!("profile covers sizes 1..={} but {n} are needed", self.entries.len())));
        }
        for (i, e) in self.entries[..n].iter().enumerate() {
            if e.size != i + 1 {
                return Err(invalid(format!("profile entry {i} has size {} (expected {})", e.size, i + 1)));
            }
        }
        Ok(())
    }
}

/// A single tree of every size: growth with a fixed seed (any tree works for a
/// size-only toll).
fn size_only_values(model: &Model, toll: &TollSpec, max_size: usize) -> Result<Vec<f64>> {
    use rand::SeedableRng;
    if max_size > 1_000_000 {
        return Err(Error::ResourceLimit(format!("size-only profile up to {max_size} is too large")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut out = Vec::with_capacity(max_size);
    if max_size == 0 {
        return Ok(out);
    }
    // f depends only on the size, so the toll at the root of the fringe subtrees
    // of one big tree covers many sizes at once; fill gaps with fresh trees
    let mut ev = Evaluator::new(toll);
    let tree = grow(model, max_size, &mut rng)?;
    ev.eval(&tree)?;
    let mut by_size = vec![None; max_size + 1];
    for (v, &f) in ev.contributions().iter().enumerate() {
        let s = ev.index().fringe(v).size();
        by_size[s].get_or_insert(f);
    }
    for (m, known) in by_size.iter().enumerate().skip(1) {
        let f = match *known {
            Some(f) => f,
            None => {
                let t = grow(model, m, &mut rng)?;
                debug_assert_eq!(t.len(), m);
                ev.eval(&t)?;
                ev.contributions()[0]
            }
        };
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_profile() {
        let p = ExpectedTollProfile::exact(&Model::Dary { d: 2 }, &TollSpec::leaf(), 3, &EnumerationLimits::default())
            .unwrap();
        let v: Vec<f64> = p.entries.iter().map(|e| e.value).collect();
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
        assert!(p.is_exact_upto(3));
    }

    #[test]
    fn size_only_reaches_large_sizes() {
        let p = ExpectedTollProfile::exact(
            &Model::Dary { d: 2 },
            &TollSpec::path_length(),
            500,
            &EnumerationLimits::default(),
        )
        .unwrap();
        assert_eq!(p.len(), 500);
        assert!(p.entries.iter().all(|e| e.value == (e.size - 1) as f64));
    }

    #[test]
    fn outdegree_profile_matches_hand_count() {
        // d=2, size 3: 4 paths (root outdegree 1) and 2 cherries (outdegree 2)
        let p = ExpectedTollProfile::exact(
            &Model::Dary { d: 2 },
            &TollSpec::outdegree(2),
            3,
            &EnumerationLimits::default(),
        )
        .unwrap();
        assert!((p.get(3).unwrap().value - 1.0 / 3.0).abs() < 1e-15);
    }
}
