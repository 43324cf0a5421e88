//! Per-tree precomputation shared by all toll evaluations.

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::tree::{AnyTree, DAryTree, Equivalence, IncreasingTree, PlaneTree};

const NONE: u32 = u32::MAX;

/// Which optional per-vertex aggregates a toll needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Needs {
    pub shape_classes: bool,
    pub labeled_classes: bool,
    pub subtree_counts: bool,
    pub orbits: Option<Equivalence>,
}

impl Needs {
    pub fn union(self, other: Needs) -> Needs {
        Needs {
            shape_classes: self.shape_classes || other.shape_classes,
            labeled_classes: self.labeled_classes || other.labeled_classes,
            subtree_counts: self.subtree_counts || other.subtree_counts,
            orbits: self.orbits.or(other.orbits),
        }
    }

    fn classes(&self, eq: Equivalence) -> bool {
        match eq {
            Equivalence::Shape => self.shape_classes,
            Equivalence::Labeled => self.labeled_classes,
        }
    }
}

/// Flattened view of one tree: sizes and child lists for every fringe subtree,
/// plus whatever optional aggregates were requested.
///
/// Vertex indices follow the source tree (label order), so every child has a
/// larger index than its parent.
#[derive(Clone, Debug, Default)]
pub struct FringeIndex {
    arity: Option<usize>,
    labels: Vec<u32>,
    parent: Vec<u32>,
    position: Vec<u32>,
    size: Vec<u32>,
    child_start: Vec<u32>,
    child_list: Vec<u32>,
    shape_class: Vec<u32>,
    labeled_class: Vec<u32>,
    /// exact `s(T_v)` while it fits, else `0`
    subtrees_exact: Vec<u128>,
    /// `ln s(T_v)`
    log_subtrees: Vec<f64>,
    orbits: Vec<u32>,
    orbit_equivalence: Option<Equivalence>,
    needs: Needs,
    scratch: Scratch,
}

#[derive(Clone, Debug, Default)]
struct Scratch {
    interner: FxHashMap<SmallVec<[u32; 4]>, u32>,
    bytes_interner: FxHashMap<Vec<u8>, u32>,
}

impl FringeIndex {
    pub fn build<T: IncreasingTree>(tree: &T, needs: Needs) -> Self {
        let mut idx = FringeIndex::default();
        idx.rebuild(tree, needs);
        idx
    }

    /// Rebuilds in place, reusing allocations.
    pub fn rebuild<T: IncreasingTree>(&mut self, tree: &T, needs: Needs) {
        let n = tree.len();
        self.arity = tree.arity();
        self.needs = needs;
        self.labels.clear();
        self.parent.clear();
        self.position.clear();
        self.labels.extend((0..n).map(|v| tree.label(v)));
        self.parent.extend((0..n).map(|v| tree.parent(v).map_or(NONE, |p| p as u32)));
        self.position.extend((0..n).map(|v| tree.position(v).map_or(0, |p| p as u32)));

        // child lists, counting-sort style, in the tree's own child order
        self.child_start.clear();
        self.child_start.resize(n + 1, 0);
        for v in 0..n {
            self.child_start[v + 1] = self.child_start[v] + tree.out_degree(v) as u32;
        }
        self.child_list.clear();
        self.child_list.resize(n.saturating_sub(1), 0);
        for v in 0..n {
            let start = self.child_start[v] as usize;
            for (slot, c) in self.child_list[start..].iter_mut().zip(tree.children(v)) {
                *slot = c as u32;
            }
        }

        self.size.clear();
        self.size.resize(n, 1);
        for v in (1..n).rev() {
            let p = self.parent[v] as usize;
            self.size[p] += self.size[v];
        }
        self.compute_optional();
    }

    fn compute_optional(&mut self) {
        let n = self.len();
        let needs = self.needs;
        let orbit_eq = needs.orbits;
        let want_shape = needs.shape_classes || orbit_eq == Some(Equivalence::Shape);
        let want_labeled = needs.labeled_classes || orbit_eq == Some(Equivalence::Labeled);

        self.shape_class.clear();
        if want_shape {
            let mut interner = std::mem::take(&mut self.scratch.interner);
            interner.clear();
            self.shape_class.resize(n, 0);
            let mut key: SmallVec<[u32; 4]> = SmallVec::new();
            for v in (0..n).rev() {
                key.clear();
                key.extend(self.children_of(v).map(|c| self.shape_class[c]));
                key.sort_unstable();
                let next = interner.len() as u32;
                self.shape_class[v] = *interner.entry(key.clone()).or_insert(next);
            }
            self.scratch.interner = interner;
        }

        self.labeled_class.clear();
        if want_labeled {
            let mut interner = std::mem::take(&mut self.scratch.bytes_interner);
            interner.clear();
            self.labeled_class.resize(n, 0);
            for v in (0..n).rev() {
                let form = self.labeled_bytes(v);
                let next = interner.len() as u32;
                self.labeled_class[v] = *interner.entry(form).or_insert(next);
            }
            self.scratch.bytes_interner = interner;
        }

        self.subtrees_exact.clear();
        self.log_subtrees.clear();
        if needs.subtree_counts {
            self.subtrees_exact.resize(n, 1);
            self.log_subtrees.resize(n, 0.0);
            for v in (0..n).rev() {
                let mut exact: Option<u128> = Some(1);
                let mut log = 0.0;
                for c in self.children_of(v) {
                    let sc = self.subtrees_exact[c];
                    exact = exact.and_then(|e| if sc == 0 { None } else { e.checked_mul(sc.checked_add(1)?) });
                    log += log1p_of_exp(self.log_subtrees[c]);
                }
                self.subtrees_exact[v] = exact.unwrap_or(0);
                self.log_subtrees[v] = match exact {
                    Some(e) => (e as f64).ln(),
                    None => log,
                };
            }
        }

        self.orbits.clear();
        self.orbit_equivalence = orbit_eq;
        if let Some(eq) = orbit_eq {
            self.orbits.resize(n, 1);
            let mut classes: SmallVec<[(u32, u32); 8]> = SmallVec::new();
            for v in (0..n).rev() {
                classes.clear();
                classes.extend(self.children_of(v).map(|c| (self.class_of(c, eq), self.orbits[c])));
                classes.sort_unstable();
                classes.dedup_by_key(|x| x.0);
                self.orbits[v] = 1 + classes.iter().map(|x| x.1).sum::<u32>();
            }
        }
    }

    fn children_of(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.child_list[self.child_start[v] as usize..self.child_start[v + 1] as usize]
            .iter()
            .map(|&c| c as usize)
    }

    fn class_of(&self, v: usize, eq: Equivalence) -> u32 {
        match eq {
            Equivalence::Shape => self.shape_class[v],
            Equivalence::Labeled => self.labeled_class[v],
        }
    }

    /// Vertices of the fringe subtree at `v`, in label order.
    fn subtree_vertices(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.size[v] as usize);
        out.push(v);
        let mut i = 0;
        while i < out.len() {
            let u = out[i];
            out.extend(self.children_of(u));
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Canonical labelled bytes of the fringe subtree at `v`.
    fn labeled_bytes(&self, v: usize) -> Vec<u8> {
        crate::tree::canonical_form(&self.materialize(v), Equivalence::Labeled).as_bytes().to_vec()
    }

    /// Copy of the fringe subtree at `v`, relabelled `1..=size`.
    pub fn materialize(&self, v: usize) -> AnyTree {
        let verts = self.subtree_vertices(v);
        let mut local = FxHashMap::default();
        for (i, &u) in verts.iter().enumerate() {
            local.insert(u, i);
        }
        match self.arity {
            Some(d) => {
                let records: Vec<(u32, Option<usize>, usize)> = verts
                    .iter()
                    .enumerate()
                    .map(|(i, &u)| {
                        let p = (i > 0).then(|| local[&(self.parent[u] as usize)]);
                        (i as u32 + 1, p, self.position[u] as usize)
                    })
                    .collect();
                AnyTree::Dary(DAryTree::from_records(d, &records).expect("fringe of a valid tree"))
            }
            None => {
                // records must list each parent's children in plane order
                let mut records: Vec<(u32, Option<usize>)> = Vec::with_capacity(verts.len());
                let mut order = vec![v];
                let mut i = 0;
                while i < order.len() {
                    let u = order[i];
                    order.extend(self.children_of(u));
                    i += 1;
                }
                let mut rec_of = FxHashMap::default();
                for (r, &u) in order.iter().enumerate() {
                    rec_of.insert(u, r);
                    let p = (u != v).then(|| rec_of[&(self.parent[u] as usize)]);
                    records.push((local[&u] as u32 + 1, p));
                }
                AnyTree::Plane(PlaneTree::from_records(&records).expect("fringe of a valid tree"))
            }
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn needs(&self) -> Needs {
        self.needs
    }

    pub fn arity(&self) -> Option<usize> {
        self.arity
    }

    pub fn fringe(&self, v: usize) -> Fringe<'_> {
        Fringe { index: self, v }
    }

    /// One view per vertex, in label order (root first).
    pub fn fringes(&self) -> impl Iterator<Item = Fringe<'_>> + '_ {
        (0..self.len()).map(move |v| self.fringe(v))
    }

    pub(crate) fn parent_of(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then_some(self.parent[v] as usize)
    }
}

/// `ln(1 + e^x)` without overflow.
fn log1p_of_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// The fringe subtree rooted at one vertex of an indexed tree.
#[derive(Clone, Copy)]
pub struct Fringe<'a> {
    index: &'a FringeIndex,
    v: usize,
}

impl<'a> Fringe<'a> {
    pub fn vertex(&self) -> usize {
        self.v
    }

    pub fn index(&self) -> &'a FringeIndex {
        self.index
    }

    /// Label of the fringe root in the host tree.
    pub fn root_label(&self) -> u32 {
        self.index.labels[self.v]
    }

    pub fn size(&self) -> usize {
        self.index.size[self.v] as usize
    }

    pub fn out_degree(&self) -> usize {
        (self.index.child_start[self.v + 1] - self.index.child_start[self.v]) as usize
    }

    /// Root branches, in slot or plane order.
    pub fn branches(&self) -> impl Iterator<Item = Fringe<'a>> + 'a {
        let index = self.index;
        index.children_of(self.v).map(move |c| Fringe { index, v: c })
    }

    /// Class id under `eq`; ids are only comparable within one index.
    ///
    /// Panics when the index was built without the matching `Needs` flag.
    pub fn class(&self, eq: Equivalence) -> u32 {
        assert!(
            self.index.needs.classes(eq) || self.index.orbit_equivalence == Some(eq),
            "fringe index built without {eq:?} classes"
        );
        self.index.class_of(self.v, eq)
    }

    /// Exact number of subtrees containing the root, if it fits in 128 bits.
    pub fn subtree_count(&self) -> Option<u128> {
        assert!(self.index.needs.subtree_counts, "fringe index built without subtree counts");
        match self.index.subtrees_exact[self.v] {
            0 => None,
            s => Some(s),
        }
    }

    /// `ln s(T)` where `s` counts subtrees containing the root.
    pub fn log_subtree_count(&self) -> f64 {
        assert!(self.index.needs.subtree_counts, "fringe index built without subtree counts");
        self.index.log_subtrees[self.v]
    }

    pub fn orbit_count(&self) -> u32 {
        assert!(self.index.orbit_equivalence.is_some(), "fringe index built without orbits");
        self.index.orbits[self.v]
    }

    /// Canonical labelled form (slots, order and relative label order).
    pub fn labeled_form(&self) -> crate::tree::CanonicalForm {
        crate::tree::canonical_form(&self.materialize(), Equivalence::Labeled)
    }

    pub fn materialize(&self) -> AnyTree {
        self.index.materialize(self.v)
    }
}
