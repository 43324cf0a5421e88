//! Exhaustive enumeration of small increasing trees.
//!
//! Trees of size `n` are produced by inserting label `n` at every admissible
//! position of every tree of size `n - 1`. The order is lexicographic in the
//! sequence of insertion choices, where the choices available in a tree are
//! ordered by vertex index and then by slot (d-ary) or gap (plane). Golden
//! tests rely on this order.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::model::Model;

use super::{count_dary, count_plane, count_recursive, AnyTree, DAryTree, IncreasingTree, PlaneTree};

/// Upper bound on the number of trees an enumeration may produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_trees: u64,
}

impl Default for EnumerationLimits {
    /// Sized so that collected enumerations stay well below 2 GB; gives
    /// n <= 8 for binary trees, 7 for d = 3, 6 for d = 4 and 8 for PORTs.
    fn default() -> Self {
        EnumerationLimits { max_trees: 200_000 }
    }
}

impl EnumerationLimits {
    pub fn unlimited() -> Self {
        EnumerationLimits { max_trees: u64::MAX }
    }

    /// Largest size whose enumeration fits the budget.
    pub fn max_size(&self, model: &Model) -> usize {
        let mut n = 1;
        while count_model(model, n + 1).to_u64().is_some_and(|c| c <= self.max_trees) {
            n += 1;
        }
        n
    }

    pub fn check(&self, model: &Model, n: usize) -> Result<()> {
        let count = count_model(model, n);
        if count.to_u64().is_some_and(|c| c <= self.max_trees) {
            Ok(())
        } else {
            Err(Error::ResourceLimit(format!(
                "enumerating {model} trees of size {n} yields {count} trees, above the limit of {} (max size {})",
                self.max_trees,
                self.max_size(model)
            )))
        }
    }
}

/// Number of distinct trees the enumeration of `model` produces at size `n`
/// (PORTs for every GPORT parameter).
pub(crate) fn count_model(model: &Model, n: usize) -> BigUint {
    match *model {
        Model::Dary { d } => count_dary(d, n),
        Model::Recursive => count_recursive(n),
        Model::Gport { .. } => count_plane(n),
    }
}

fn root_of(model: &Model) -> Result<AnyTree> {
    model.validate()?;
    Ok(match *model {
        Model::Dary { d } => AnyTree::Dary(DAryTree::single(d)?),
        _ => AnyTree::Plane(PlaneTree::single()),
    })
}

fn insertion_choices(model: &Model, tree: &AnyTree, out: &mut Vec<(usize, usize)>) {
    out.clear();
    match (model, tree) {
        (Model::Dary { .. }, AnyTree::Dary(t)) => out.extend(t.free_slots()),
        (Model::Recursive, AnyTree::Plane(t)) => {
            out.extend((0..t.len()).map(|v| (v, t.out_degree(v))));
        }
        (Model::Gport { .. }, AnyTree::Plane(t)) => {
            for v in 0..t.len() {
                out.extend((0..=t.out_degree(v)).map(|g| (v, g)));
            }
        }
        _ => unreachable!("tree kind always matches the model"),
    }
}

fn insert(tree: &mut AnyTree, (v, pos): (usize, usize)) {
    let label = tree.len() as u32 + 1;
    match tree {
        AnyTree::Dary(t) => {
            t.push_unchecked(v, pos, label);
        }
        AnyTree::Plane(t) => {
            t.push_unchecked(v, pos, label);
        }
    }
}

fn remove_last(tree: &mut AnyTree) {
    match tree {
        AnyTree::Dary(t) => t.pop_last(),
        AnyTree::Plane(t) => t.pop_last(),
    }
}

fn dfs<F: FnMut(&AnyTree)>(model: &Model, tree: &mut AnyTree, target: usize, all_sizes: bool, visit: &mut F) {
    if all_sizes || tree.len() == target {
        visit(tree);
    }
    if tree.len() == target {
        return;
    }
    let mut choices = Vec::new();
    insertion_choices(model, tree, &mut choices);
    for c in choices {
        insert(tree, c);
        dfs(model, tree, target, all_sizes, visit);
        remove_last(tree);
    }
}

/// Visits every tree of every size `1..=max_n`, parents before their extensions.
pub fn for_each_tree_upto<F: FnMut(&AnyTree)>(
    model: &Model,
    max_n: usize,
    limits: &EnumerationLimits,
    mut visit: F,
) -> Result<()> {
    if max_n == 0 {
        return Ok(());
    }
    limits.check(model, max_n)?;
    let mut tree = root_of(model)?;
    dfs(model, &mut tree, max_n, true, &mut visit);
    Ok(())
}

/// Visits every tree of size `n` of the model once.
pub fn enumerate_each<F: FnMut(&AnyTree)>(model: &Model, n: usize, limits: &EnumerationLimits, mut visit: F) -> Result<()> {
    if n == 0 {
        return Err(crate::error::invalid("tree size must be at least 1"));
    }
    limits.check(model, n)?;
    let mut tree = root_of(model)?;
    dfs(model, &mut tree, n, false, &mut visit);
    Ok(())
}

/// Every tree of size `n` of the model, once each.
pub fn enumerate(model: &Model, n: usize, limits: &EnumerationLimits) -> Result<Vec<AnyTree>> {
    let mut out = Vec::new();
    enumerate_each(model, n, limits, |t| out.push(t.clone()))?;
    Ok(out)
}

pub fn for_each_dary<F: FnMut(&DAryTree)>(d: usize, n: usize, limits: &EnumerationLimits, mut visit: F) -> Result<()> {
    enumerate_each(&Model::dary(d)?, n, limits, |t| match t {
        AnyTree::Dary(t) => visit(t),
        AnyTree::Plane(_) => unreachable!(),
    })
}

/// All PORTs (plane increasing trees) of size `n`.
pub fn for_each_plane<F: FnMut(&PlaneTree)>(n: usize, limits: &EnumerationLimits, mut visit: F) -> Result<()> {
    enumerate_each(&Model::port(), n, limits, |t| match t {
        AnyTree::Plane(t) => visit(t),
        AnyTree::Dary(_) => unreachable!(),
    })
}

/// All recursive trees of size `n`, in their label-ordered embedding.
pub fn for_each_recursive<F: FnMut(&PlaneTree)>(n: usize, limits: &EnumerationLimits, mut visit: F) -> Result<()> {
    enumerate_each(&Model::Recursive, n, limits, |t| match t {
        AnyTree::Plane(t) => visit(t),
        AnyTree::Dary(_) => unreachable!(),
    })
}

pub fn enumerate_dary(d: usize, n: usize) -> Result<Vec<DAryTree>> {
    let mut out = Vec::new();
    for_each_dary(d, n, &EnumerationLimits::default(), |t| out.push(t.clone()))?;
    Ok(out)
}

pub fn enumerate_plane(n: usize) -> Result<Vec<PlaneTree>> {
    let mut out = Vec::new();
    for_each_plane(n, &EnumerationLimits::default(), |t| out.push(t.clone()))?;
    Ok(out)
}

pub fn enumerate_recursive(n: usize) -> Result<Vec<PlaneTree>> {
    let mut out = Vec::new();
    for_each_recursive(n, &EnumerationLimits::default(), |t| out.push(t.clone()))?;
    Ok(out)
}
