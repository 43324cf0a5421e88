//! Increasing trees: storage, growth processes, enumeration, canonical forms
//! and exact model probabilities.
//!
//! Both tree types store their vertices in increasing label order, so vertex
//! `0` is the root, every parent precedes its children, and iterating the
//! vertex indices backwards is a valid post-order.

mod canonical;
mod dary;
mod enumerate;
mod grow;
mod plane;
mod probability;
mod text;

pub use canonical::{canonical_form, CanonicalForm, Equivalence};
pub use dary::DAryTree;
pub use enumerate::{
    enumerate, enumerate_dary, enumerate_each, enumerate_plane, enumerate_recursive, for_each_dary,
    for_each_plane, for_each_recursive, for_each_tree_upto, EnumerationLimits,
};
pub use grow::{grow, grow_dary, grow_gport, grow_recursive};
pub use plane::PlaneTree;
pub use probability::{
    count_dary, count_plane, count_recursive, gport_total_weight, tree_probability, weight_port,
};

use std::fmt;

use crate::error::Result;

/// Read access shared by d-ary and plane increasing trees.
pub trait IncreasingTree {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn label(&self, v: usize) -> u32;

    fn parent(&self, v: usize) -> Option<usize>;

    /// Children of `v` in slot order (d-ary) or plane order.
    fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_;

    fn out_degree(&self, v: usize) -> usize;

    /// Position of `v` at its parent: the slot index for d-ary trees, the
    /// sibling index for plane trees. `None` for the root.
    fn position(&self, v: usize) -> Option<usize>;

    /// `Some(d)` for d-ary trees.
    fn arity(&self) -> Option<usize>;
}

/// Either kind of increasing tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AnyTree {
    Dary(DAryTree),
    Plane(PlaneTree),
}

impl AnyTree {
    /// Parses either textual form: `1[0:_, 1:_]` (d-ary) or `1()` (plane).
    pub fn parse(s: &str) -> Result<Self> {
        if s.contains('[') {
            s.parse().map(AnyTree::Dary)
        } else {
            s.parse().map(AnyTree::Plane)
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AnyTree::Dary(t) => t.validate(),
            AnyTree::Plane(t) => t.validate(),
        }
    }

    /// Copy of the subtree rooted at `v`, relabelled `1..=size` by relative label order.
    pub fn fringe(&self, v: usize) -> AnyTree {
        match self {
            AnyTree::Dary(t) => AnyTree::Dary(t.fringe(v)),
            AnyTree::Plane(t) => AnyTree::Plane(t.fringe(v)),
        }
    }

    /// Copy with every label shifted by `offset`.
    pub fn shifted_labels(&self, offset: u32) -> AnyTree {
        match self {
            AnyTree::Dary(t) => AnyTree::Dary(t.shifted_labels(offset)),
            AnyTree::Plane(t) => AnyTree::Plane(t.shifted_labels(offset)),
        }
    }
}

impl From<DAryTree> for AnyTree {
    fn from(t: DAryTree) -> Self {
        AnyTree::Dary(t)
    }
}

impl From<PlaneTree> for AnyTree {
    fn from(t: PlaneTree) -> Self {
        AnyTree::Plane(t)
    }
}

impl fmt::Display for AnyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyTree::Dary(t) => t.fmt(f),
            AnyTree::Plane(t) => t.fmt(f),
        }
    }
}

impl IncreasingTree for AnyTree {
    fn len(&self) -> usize {
        match self {
            AnyTree::Dary(t) => t.len(),
            AnyTree::Plane(t) => t.len(),
        }
    }

    fn label(&self, v: usize) -> u32 {
        match self {
            AnyTree::Dary(t) => t.label(v),
            AnyTree::Plane(t) => t.label(v),
        }
    }

    fn parent(&self, v: usize) -> Option<usize> {
        match self {
            AnyTree::Dary(t) => t.parent(v),
            AnyTree::Plane(t) => t.parent(v),
        }
    }

    fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (a, b) = match self {
            AnyTree::Dary(t) => (Some(t.children(v)), None),
            AnyTree::Plane(t) => (None, Some(t.children(v))),
        };
        a.into_iter().flatten().chain(b.into_iter().flatten())
    }

    fn out_degree(&self, v: usize) -> usize {
        match self {
            AnyTree::Dary(t) => t.out_degree(v),
            AnyTree::Plane(t) => t.out_degree(v),
        }
    }

    fn position(&self, v: usize) -> Option<usize> {
        match self {
            AnyTree::Dary(t) => t.position(v),
            AnyTree::Plane(t) => t.position(v),
        }
    }

    fn arity(&self) -> Option<usize> {
        match self {
            AnyTree::Dary(t) => t.arity(),
            AnyTree::Plane(t) => t.arity(),
        }
    }
}

/// Vertices of the subtree rooted at `v`, in increasing label order.
pub(crate) fn subtree_vertices<T: IncreasingTree>(tree: &T, v: usize) -> Vec<usize> {
    let mut out = vec![v];
    let mut i = 0;
    while i < out.len() {
        let u = out[i];
        out.extend(tree.children(u));
        i += 1;
    }
    out.sort_unstable_by_key(|&u| tree.label(u));
    out
}

/// Labels increase along every root path and the storage order matches label order.
pub(crate) fn check_increasing<T: IncreasingTree>(tree: &T) -> Result<()> {
    use crate::error::Error;
    if tree.is_empty() {
        return Err(Error::InvalidTree("tree has no vertices".into()));
    }
    if tree.parent(0).is_some() {
        return Err(Error::InvalidTree("vertex 0 must be the root".into()));
    }
    for v in 1..tree.len() {
        if tree.label(v) <= tree.label(v - 1) {
            return Err(Error::InvalidTree(format!(
                "labels must be distinct and stored in increasing order (vertex {v})"
            )));
        }
        match tree.parent(v) {
            None => return Err(Error::InvalidTree(format!("vertex {v} has no parent"))),
            Some(p) if p >= v => {
                return Err(Error::InvalidTree(format!(
                    "label {} is not larger than its parent's label",
                    tree.label(v)
                )))
            }
            Some(_) => {}
        }
    }
    Ok(())
}
