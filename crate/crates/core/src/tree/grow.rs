//! Growth processes that produce random increasing trees one vertex at a time.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::model::Model;

use super::{AnyTree, DAryTree, IncreasingTree, PlaneTree};

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("tree size must be at least 1"));
    }
    if n >= u32::MAX as usize {
        return Err(invalid("tree size exceeds the 32-bit label space"));
    }
    Ok(())
}

/// Uniform random d-ary increasing tree with `n` vertices.
///
/// Each new vertex takes one of the `(d-1)(k-1)+1` free slots uniformly at random.
pub fn grow_dary<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<DAryTree> {
    check_size(n)?;
    let mut tree = DAryTree::with_capacity(d, n)?;
    let mut free: Vec<(u32, u32)> = Vec::with_capacity((d - 1) * n + 1);
    free.extend((0..d as u32).map(|s| (0, s)));
    for k in 1..n {
        let (v, s) = free.swap_remove(rng.random_range(0..free.len()));
        tree.push_unchecked(v as usize, s as usize, k as u32 + 1);
        free.extend((0..d as u32).map(|s| (k as u32, s)));
    }
    Ok(tree)
}

/// Uniform random recursive tree: each new vertex picks its parent uniformly
/// and becomes the parent's rightmost child.
pub fn grow_recursive<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PlaneTree> {
    check_size(n)?;
    let mut tree = PlaneTree::with_capacity(n);
    for k in 1..n {
        let p = rng.random_range(0..k);
        let pos = tree.out_degree(p);
        tree.push_unchecked(p, pos, k as u32 + 1);
    }
    Ok(tree)
}

/// Random GPORT: the new vertex attaches to `v` with probability proportional
/// to `alpha + outdeg(v)`, then takes one of the `outdeg(v) + 1` gaps among
/// its future siblings uniformly.
///
/// Parent choice is a two-part mixture: with probability `alpha*m / (alpha*m + e)`
/// a uniform vertex (`m` vertices so far), otherwise the parent of a uniform
/// edge (`e = m - 1` edges), which picks `v` proportionally to its out-degree.
pub fn grow_gport<R: Rng + ?Sized>(alpha: f64, n: usize, rng: &mut R) -> Result<PlaneTree> {
    check_size(n)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive and finite, got {alpha}")));
    }
    let mut tree = PlaneTree::with_capacity(n);
    // edge_parents[i] is the parent of vertex i + 1
    let mut edge_parents: Vec<u32> = Vec::with_capacity(n);
    for k in 1..n {
        let m = k as f64;
        let edges = (k - 1) as f64;
        let p = if rng.random::<f64>() * (alpha * m + edges) < alpha * m {
            rng.random_range(0..k)
        } else {
            edge_parents[rng.random_range(0..k - 1)] as usize
        };
        let pos = rng.random_range(0..=tree.out_degree(p));
        tree.push_unchecked(p, pos, k as u32 + 1);
        edge_parents.push(p as u32);
    }
    Ok(tree)
}

/// Grows a tree of the given model.
pub fn grow<R: Rng + ?Sized>(model: &Model, n: usize, rng: &mut R) -> Result<AnyTree> {
    model.validate()?;
    Ok(match *model {
        Model::Dary { d } => AnyTree::Dary(grow_dary(d, n, rng)?),
        Model::Recursive => AnyTree::Plane(grow_recursive(n, rng)?),
        Model::Gport { .. } => AnyTree::Plane(grow_gport(model.alpha_f64().unwrap(), n, rng)?),
    })
}
