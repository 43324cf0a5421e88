use crate::error::{invalid, Error, Result};

use super::{check_increasing, subtree_vertices, IncreasingTree};

const NONE: u32 = u32::MAX;

/// A d-ary increasing tree: every vertex owns `d` distinguishable child slots.
///
/// Trees with the same shape but different slot assignments are different trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DAryTree {
    d: usize,
    labels: Vec<u32>,
    parent: Vec<u32>,
    slot: Vec<u32>,
    /// `children[v * d + s]` is the child in slot `s` of `v`.
    children: Vec<u32>,
    out_degree: Vec<u32>,
}

impl DAryTree {
    /// The single-vertex tree with label 1.
    pub fn single(d: usize) -> Result<Self> {
        if d < 2 || d >= NONE as usize {
            return Err(invalid(format!("arity d must be at least 2, got {d}")));
        }
        Ok(DAryTree {
            d,
            labels: vec![1],
            parent: vec![NONE],
            slot: vec![0],
            children: vec![NONE; d],
            out_degree: vec![0],
        })
    }

    pub(crate) fn with_capacity(d: usize, n: usize) -> Result<Self> {
        let mut t = Self::single(d)?;
        t.labels.reserve(n);
        t.parent.reserve(n);
        t.slot.reserve(n);
        t.children.reserve(n * d);
        t.out_degree.reserve(n);
        Ok(t)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Attaches a new vertex, labelled one more than the current maximum, in
    /// slot `slot` of `parent`. Returns the new vertex index.
    pub fn attach(&mut self, parent: usize, slot: usize) -> Result<usize> {
        if parent >= self.len() || slot >= self.d {
            return Err(invalid(format!("no slot {slot} at vertex {parent}")));
        }
        if self.children[parent * self.d + slot] != NONE {
            return Err(Error::InvalidTree(format!("slot {slot} of vertex {parent} is occupied")));
        }
        let label = self.labels.last().copied().unwrap_or(0).checked_add(1).ok_or_else(|| {
            Error::ResourceLimit("label space exhausted".into())
        })?;
        Ok(self.push_unchecked(parent, slot, label))
    }

    pub(crate) fn push_unchecked(&mut self, parent: usize, slot: usize, label: u32) -> usize {
        let v = self.labels.len();
        self.labels.push(label);
        self.parent.push(parent as u32);
        self.slot.push(slot as u32);
        self.children.extend(std::iter::repeat_n(NONE, self.d));
        self.out_degree.push(0);
        self.children[parent * self.d + slot] = v as u32;
        self.out_degree[parent] += 1;
        v
    }

    /// Removes the vertex with the largest label (always a leaf).
    pub(crate) fn pop_last(&mut self) {
        let v = self.labels.len() - 1;
        debug_assert!(v > 0);
        let p = self.parent[v] as usize;
        self.children[p * self.d + self.slot[v] as usize] = NONE;
        self.out_degree[p] -= 1;
        self.labels.pop();
        self.parent.pop();
        self.slot.pop();
        self.out_degree.pop();
        self.children.truncate(self.labels.len() * self.d);
    }

    /// Child occupying slot `s` of `v`.
    pub fn child(&self, v: usize, s: usize) -> Option<usize> {
        match self.children[v * self.d + s] {
            NONE => None,
            c => Some(c as usize),
        }
    }

    /// Slot of `v` at its parent (`None` for the root).
    pub fn slot(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.slot[v] as usize)
    }

    /// Free slots `(vertex, slot)` in insertion-slot order: by vertex, then by slot.
    pub fn free_slots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == NONE)
            .map(move |(i, _)| (i / self.d, i % self.d))
    }

    pub fn free_slot_count(&self) -> usize {
        self.d * self.len() - (self.len() - 1)
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        check_increasing(self)?;
        let n = self.len();
        if self.children.len() != n * self.d {
            return Err(Error::InvalidTree("slot table has the wrong length".into()));
        }
        for v in 1..n {
            let p = self.parent[v] as usize;
            if self.children[p * self.d + self.slot[v] as usize] as usize != v {
                return Err(Error::InvalidTree(format!("vertex {v} is not in its parent's slot")));
            }
        }
        let used = self.children.iter().filter(|&&c| c != NONE).count();
        if used != n - 1 {
            return Err(Error::InvalidTree("slot table disagrees with parent links".into()));
        }
        for v in 0..n {
            let deg = self.children[v * self.d..(v + 1) * self.d].iter().filter(|&&c| c != NONE).count();
            if deg != self.out_degree[v] as usize {
                return Err(Error::InvalidTree(format!("stale out-degree at vertex {v}")));
            }
        }
        Ok(())
    }

    /// True when the labels are exactly `1..=n`.
    pub fn has_standard_labels(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l as usize == i + 1)
    }

    /// Builds a tree from `(label, parent index, slot)` records given in any order.
    /// Parent indices refer to positions in `nodes`.
    pub(crate) fn from_records(d: usize, nodes: &[(u32, Option<usize>, usize)]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidTree("tree has no vertices".into()));
        }
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&i| nodes[i].0);
        let mut rank = vec![0usize; nodes.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let (root_label, root_parent, _) = nodes[order[0]];
        if root_parent.is_some() {
            return Err(Error::InvalidTree(format!(
                "the smallest label {root_label} is not at the root"
            )));
        }
        let mut t = DAryTree::with_capacity(d, nodes.len())?;
        t.labels[0] = root_label;
        for &i in &order[1..] {
            let (label, parent, slot) = nodes[i];
            let parent = parent.ok_or_else(|| Error::InvalidTree("more than one root".into()))?;
            let p = rank[parent];
            if p >= t.len() {
                return Err(Error::InvalidTree(format!(
                    "label {label} is not larger than its parent's label"
                )));
            }
            if *t.labels.last().unwrap() == label {
                return Err(Error::InvalidTree(format!("duplicate label {label}")));
            }
            if slot >= d {
                return Err(invalid(format!("slot {slot} out of range for d = {d}")));
            }
            if t.children[p * d + slot] != NONE {
                return Err(Error::InvalidTree(format!("slot {slot} used twice")));
            }
            t.push_unchecked(p, slot, label);
        }
        t.validate()?;
        Ok(t)
    }

    /// The fringe subtree rooted at `v`, relabelled `1..=size` by relative order.
    pub fn fringe(&self, v: usize) -> DAryTree {
        let verts = subtree_vertices(self, v);
        let mut index = rustc_hash::FxHashMap::default();
        for (i, &u) in verts.iter().enumerate() {
            index.insert(u, i);
        }
        let mut t = DAryTree::with_capacity(self.d, verts.len()).expect("valid arity");
        for (i, &u) in verts.iter().enumerate().skip(1) {
            t.push_unchecked(index[&(self.parent[u] as usize)], self.slot[u] as usize, i as u32 + 1);
        }
        t
    }

    pub fn shifted_labels(&self, offset: u32) -> DAryTree {
        let mut t = self.clone();
        for l in &mut t.labels {
            *l += offset;
        }
        t
    }
}

impl IncreasingTree for DAryTree {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn label(&self, v: usize) -> u32 {
        self.labels[v]
    }

    fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NONE => None,
            p => Some(p as usize),
        }
    }

    fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.children[v * self.d..(v + 1) * self.d]
            .iter()
            .filter(|&&c| c != NONE)
            .map(|&c| c as usize)
    }

    fn out_degree(&self, v: usize) -> usize {
        self.out_degree[v] as usize
    }

    fn position(&self, v: usize) -> Option<usize> {
        self.slot(v)
    }

    fn arity(&self) -> Option<usize> {
        Some(self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attach_and_pop() {
        let mut t = DAryTree::single(2).unwrap();
        assert_eq!(t.free_slot_count(), 2);
        let a = t.attach(0, 1).unwrap();
        let b = t.attach(a, 0).unwrap();
        t.validate().unwrap();
        assert_eq!(t.label(b), 3);
        assert_eq!(t.free_slot_count(), 4);
        assert_eq!(t.free_slots().collect::<Vec<_>>(), vec![(0, 0), (1, 1), (2, 0), (2, 1)]);
        assert!(t.attach(0, 1).is_err());
        assert!(t.attach(0, 2).is_err());
        t.pop_last();
        t.validate().unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.out_degree(a), 0);
    }

    #[test]
    fn free_slots_formula() {
        let mut t = DAryTree::single(3).unwrap();
        for k in 1..10 {
            let (v, s) = t.free_slots().nth(k % t.free_slot_count()).unwrap();
            t.attach(v, s).unwrap();
            assert_eq!(t.free_slots().count(), t.free_slot_count());
            assert_eq!(t.free_slot_count(), 2 * t.len() + 1);
        }
    }

    #[test]
    fn fringe_relabels_by_relative_order() {
        let mut t = DAryTree::single(2).unwrap();
        t.attach(0, 0).unwrap(); // 2
        t.attach(0, 1).unwrap(); // 3
        t.attach(2, 1).unwrap(); // 4 under 3
        t.attach(1, 0).unwrap(); // 5 under 2
        t.attach(2, 0).unwrap(); // 6 under 3
        let f = t.fringe(2);
        f.validate().unwrap();
        assert!(f.has_standard_labels());
        assert_eq!(f.len(), 3);
        assert_eq!(f.child(0, 1), Some(1));
        assert_eq!(f.child(0, 0), Some(2));
    }

    #[test]
    fn arity_must_be_at_least_two() {
        assert!(DAryTree::single(1).is_err());
        assert!(DAryTree::single(0).is_err());
    }
}
