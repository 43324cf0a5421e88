//! The additive recursion `F(T) = sum_j F(B_j) + f(T)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::IncreasingTree;

use super::index::{FringeIndex, Needs};
use super::toll::TollSpec;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    /// Toll contribution `f` of the fringe subtree at each vertex, if requested.
    pub per_vertex: Option<Vec<f64>>,
}

/// Reusable evaluator for one toll: keeps the fringe index and work buffers
/// between trees.
#[derive(Clone, Debug)]
pub struct Evaluator<'a> {
    toll: &'a TollSpec,
    needs: Needs,
    index: FringeIndex,
    contributions: Vec<f64>,
    subtree_values: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(toll: &'a TollSpec) -> Self {
        Self::with_needs(toll, Needs::default())
    }

    /// Also computes `extra` aggregates, e.g. for callers that inspect the index.
    pub fn with_needs(toll: &'a TollSpec, extra: Needs) -> Self {
        Evaluator {
            toll,
            needs: toll.needs().union(extra),
            index: FringeIndex::default(),
            contributions: Vec::new(),
            subtree_values: Vec::new(),
        }
    }

    /// `F(T)` via one post-order pass.
    pub fn eval<T: IncreasingTree>(&mut self, tree: &T) -> Result<f64> {
        self.index.rebuild(tree, self.needs);
        self.run()
    }

    fn run(&mut self) -> Result<f64> {
        let n = self.index.len();
        self.contributions.clear();
        self.contributions.resize(n, 0.0);
        self.subtree_values.clear();
        self.subtree_values.resize(n, 0.0);
        for v in (0..n).rev() {
            let fringe = self.index.fringe(v);
            let f = self.toll.eval(&fringe).map_err(|message| Error::Toll {
                toll: self.toll.name().to_string(),
                vertex: v,
                label: fringe.root_label(),
                message,
            })?;
            if !f.is_finite() {
                return Err(Error::Toll {
                    toll: self.toll.name().to_string(),
                    vertex: v,
                    label: fringe.root_label(),
                    message: format!("non-finite toll value {f}"),
                });
            }
            self.contributions[v] = f;
            self.subtree_values[v] += f;
            if let Some(p) = self.index.parent_of(v) {
                self.subtree_values[p] += self.subtree_values[v];
            }
        }
        Ok(self.subtree_values[0])
    }

    pub fn index(&self) -> &FringeIndex {
        &self.index
    }

    /// Toll values from the last evaluation, one per vertex.
    pub fn contributions(&self) -> &[f64] {
        &self.contributions
    }

    /// `F` of every fringe subtree from the last evaluation.
    pub fn subtree_values(&self) -> &[f64] {
        &self.subtree_values
    }
}

/// Evaluates the additive functional of `toll` on `tree`.
pub fn evaluate_additive<T: IncreasingTree>(toll: &TollSpec, tree: &T) -> Result<FunctionalValue> {
    evaluate_additive_with(toll, tree, false)
}

pub fn evaluate_additive_with<T: IncreasingTree>(
    toll: &TollSpec,
    tree: &T,
    per_vertex: bool,
) -> Result<FunctionalValue> {
    let mut ev = Evaluator::new(toll);
    let value = ev.eval(tree)?;
    Ok(FunctionalValue { value, per_vertex: per_vertex.then(|| ev.contributions.clone()) })
}

/// `f(T)` for the whole tree.
pub fn toll_at_root<T: IncreasingTree>(toll: &TollSpec, tree: &T) -> Result<f64> {
    let index = FringeIndex::build(tree, toll.needs());
    toll.eval(&index.fringe(0)).map_err(|message| Error::Toll {
        toll: toll.name().to_string(),
        vertex: 0,
        label: tree.label(0),
        message,
    })
}

/// `sum_{S in fringe(T)} f(S)`, evaluating `f` separately on a standalone copy of
/// every fringe subtree. Quadratic; meant as a cross-check of the recursion.
pub fn fringe_sum<T: IncreasingTree>(toll: &TollSpec, tree: &T) -> Result<f64> {
    let index = FringeIndex::build(tree, Needs::default());
    index.fringes().map(|s| toll_at_root(toll, &s.materialize())).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::index::Fringe;
    use crate::functional::toll::TollMeta;
    use crate::tree::{DAryTree, PlaneTree};

    fn path3() -> PlaneTree {
        "1(2(3()))".parse().unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(evaluate_additive(&TollSpec::leaf(), &path3()).unwrap().value, 1.0);
        assert_eq!(evaluate_additive(&TollSpec::path_length(), &path3()).unwrap().value, 3.0);
        let cherry: DAryTree = "1[0:2[0:_, 1:_], 1:3[0:_, 1:_]]".parse().unwrap();
        let v = evaluate_additive(&TollSpec::shape(), &cherry).unwrap().value;
        assert!((v - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn breakdown_sums_to_value() {
        let t: PlaneTree = "1(2(4() 5()) 3(6(7())))".parse().unwrap();
        let fv = evaluate_additive_with(&TollSpec::log_root_subtrees(), &t, true).unwrap();
        let parts = fv.per_vertex.unwrap();
        assert_eq!(parts.len(), 7);
        assert!((parts.iter().sum::<f64>() - fv.value).abs() < 1e-12);
    }

    #[test]
    fn failures_name_the_vertex() {
        let toll = TollSpec::custom("picky", TollMeta::unbounded(), Needs::default(), |s: &Fringe<'_>| {
            if s.size() == 2 {
                Err("size two".to_string())
            } else {
                Ok(0.0)
            }
        });
        match evaluate_additive(&toll, &path3()) {
            Err(Error::Toll { vertex, label, .. }) => assert_eq!((vertex, label), (1, 2)),
            other => panic!("unexpected {other:?}"),
        }
        let nan = TollSpec::custom("nan", TollMeta::unbounded(), Needs::default(), |_: &Fringe<'_>| Ok(f64::NAN));
        assert!(evaluate_additive(&nan, &path3()).is_err());
    }
}
