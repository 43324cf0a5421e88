use crate::error::{invalid, Error, Result};

use super::{check_increasing, subtree_vertices, IncreasingTree};

const NONE: u32 = u32::MAX;

/// A plane (ordered) increasing tree: recursive trees, PORTs and GPORTs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    labels: Vec<u32>,
    parent: Vec<u32>,
    children: Vec<Vec<u32>>,
}

impl Default for PlaneTree {
    fn default() -> Self {
        Self::single()
    }
}

impl PlaneTree {
    pub fn single() -> Self {
        PlaneTree {
            labels: vec![1],
            parent: vec![NONE],
            children: vec![Vec::new()],
        }
    }

    pub(crate) fn with_capacity(n: usize) -> Self {
        let mut t = Self::single();
        t.labels.reserve(n);
        t.parent.reserve(n);
        t.children.reserve(n);
        t
    }

    /// Inserts a new vertex (label one more than the maximum) as a child of
    /// `parent`, at sibling position `position` (`0..=out_degree`).
    pub fn push_child(&mut self, parent: usize, position: usize) -> Result<usize> {
        if parent >= self.len() || position > self.children[parent].len() {
            return Err(invalid(format!("no gap {position} at vertex {parent}")));
        }
        let label = self.labels.last().copied().unwrap_or(0).checked_add(1).ok_or_else(|| {
            Error::ResourceLimit("label space exhausted".into())
        })?;
        Ok(self.push_unchecked(parent, position, label))
    }

    pub(crate) fn push_unchecked(&mut self, parent: usize, position: usize, label: u32) -> usize {
        let v = self.labels.len();
        self.labels.push(label);
        self.parent.push(parent as u32);
        self.children.push(Vec::new());
        self.children[parent].insert(position, v as u32);
        v
    }

    /// Removes the vertex with the largest label (always a leaf).
    pub(crate) fn pop_last(&mut self) {
        let v = self.labels.len() - 1;
        debug_assert!(v > 0);
        let p = self.parent[v] as usize;
        let siblings = &mut self.children[p];
        let pos = siblings.iter().position(|&c| c as usize == v).expect("linked child");
        siblings.remove(pos);
        self.labels.pop();
        self.parent.pop();
        self.children.pop();
    }

    pub fn child_list(&self, v: usize) -> &[u32] {
        &self.children[v]
    }

    /// Number of vertices with out-degree `j`.
    pub fn out_degree_count(&self, j: usize) -> usize {
        self.children.iter().filter(|c| c.len() == j).count()
    }

    /// True when every child list is sorted by label, i.e. the tree is the
    /// canonical (rightmost-insertion) embedding of a recursive tree.
    pub fn is_label_ordered(&self) -> bool {
        self.children.iter().all(|c| c.windows(2).all(|w| w[0] < w[1]))
    }

    pub fn validate(&self) -> Result<()> {
        check_increasing(self)?;
        let n = self.len();
        let mut seen = vec![false; n];
        for v in 0..n {
            for &c in &self.children[v] {
                let c = c as usize;
                if c >= n || self.parent[c] as usize != v || seen[c] {
                    return Err(Error::InvalidTree(format!("broken child link at vertex {v}")));
                }
                seen[c] = true;
            }
        }
        if seen.iter().skip(1).any(|s| !s) {
            return Err(Error::InvalidTree("vertex missing from its parent's child list".into()));
        }
        Ok(())
    }

    pub fn has_standard_labels(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l as usize == i + 1)
    }

    /// Builds a tree from `(label, parent index)` records; each parent's
    /// children keep the order in which they appear in `nodes`.
    pub(crate) fn from_records(nodes: &[(u32, Option<usize>)]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidTree("tree has no vertices".into()));
        }
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&i| nodes[i].0);
        let mut rank = vec![0usize; nodes.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        if nodes[order[0]].1.is_some() {
            return Err(Error::InvalidTree(format!(
                "the smallest label {} is not at the root",
                nodes[order[0]].0
            )));
        }
        let n = nodes.len();
        let mut t = PlaneTree {
            labels: order.iter().map(|&i| nodes[i].0).collect(),
            parent: vec![NONE; n],
            children: vec![Vec::new(); n],
        };
        for (i, &(label, parent)) in nodes.iter().enumerate() {
            let v = rank[i];
            if v > 0 && t.labels[v] == t.labels[v - 1] {
                return Err(Error::InvalidTree(format!("duplicate label {label}")));
            }
            match parent {
                None if v != 0 => return Err(Error::InvalidTree("more than one root".into())),
                None => {}
                Some(p) => {
                    let p = rank[p];
                    t.parent[v] = p as u32;
                    t.children[p].push(v as u32);
                }
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn fringe(&self, v: usize) -> PlaneTree {
        let verts = subtree_vertices(self, v);
        let mut index = vec![NONE; self.len()];
        for (i, &u) in verts.iter().enumerate() {
            index[u] = i as u32;
        }
        let n = verts.len();
        let mut t = PlaneTree {
            labels: (1..=n as u32).collect(),
            parent: vec![NONE; n],
            children: vec![Vec::new(); n],
        };
        for (i, &u) in verts.iter().enumerate() {
            if i > 0 {
                t.parent[i] = index[self.parent[u] as usize];
            }
            t.children[i] = self.children[u].iter().map(|&c| index[c as usize]).collect();
        }
        t
    }

    pub fn shifted_labels(&self, offset: u32) -> PlaneTree {
        let mut t = self.clone();
        for l in &mut t.labels {
            *l += offset;
        }
        t
    }
}

impl IncreasingTree for PlaneTree {
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
        self.children[v].iter().map(|&c| c as usize)
    }

    fn out_degree(&self, v: usize) -> usize {
        self.children[v].len()
    }

    fn position(&self, v: usize) -> Option<usize> {
        let p = self.parent(v)?;
        self.children[p].iter().position(|&c| c as usize == v)
    }

    fn arity(&self) -> Option<usize> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_positions_and_pop() {
        let mut t = PlaneTree::single();
        t.push_child(0, 0).unwrap(); // 2
        t.push_child(0, 0).unwrap(); // 3, now left of 2
        t.push_child(0, 2).unwrap(); // 4, rightmost
        t.validate().unwrap();
        assert_eq!(t.child_list(0), &[2, 1, 3]);
        assert!(!t.is_label_ordered());
        assert_eq!(t.position(1), Some(1));
        assert!(t.push_child(0, 4).is_err());
        t.pop_last();
        t.validate().unwrap();
        assert_eq!(t.child_list(0), &[2, 1]);
    }

    #[test]
    fn fringe_of_plane_tree() {
        let mut t = PlaneTree::single();
        t.push_child(0, 0).unwrap(); // 2
        t.push_child(1, 0).unwrap(); // 3 under 2
        t.push_child(0, 0).unwrap(); // 4 under root, leftmost
        t.push_child(1, 0).unwrap(); // 5 under 2, left of 3
        let f = t.fringe(1);
        f.validate().unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.child_list(0), &[2, 1]);
    }
}
