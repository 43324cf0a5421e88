//! Canonical byte strings for increasing trees under two equivalences.
//!
//! `Labeled` keeps everything that distinguishes two increasing trees: the
//! arity and slot of every child (or the plane order) and the relative order
//! of the labels. `Shape` forgets labels, slots and child order: a vertex is
//! `(` followed by its children's forms in sorted order, then `)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{AnyTree, DAryTree, IncreasingTree, PlaneTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Equivalence {
    Labeled,
    #[default]
    Shape,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    bytes: Vec<u8>,
}

const LABELED_DARY: [u8; 2] = *b"LD";
const LABELED_PLANE: [u8; 2] = *b"LP";
const SHAPE: u8 = b'S';

/// Canonical form of the whole tree. Labels are replaced by their rank, so
/// any two trees with the same relative label order compare equal.
pub fn canonical_form<T: IncreasingTree>(tree: &T, equivalence: Equivalence) -> CanonicalForm {
    match equivalence {
        Equivalence::Labeled => labeled(tree),
        Equivalence::Shape => CanonicalForm { bytes: shape_bytes(tree, 0) },
    }
}

fn push_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn labeled<T: IncreasingTree>(tree: &T) -> CanonicalForm {
    // storage order is label order, so the rank of vertex v is v
    let mut out = Vec::with_capacity(8 + 8 * tree.len());
    match tree.arity() {
        Some(d) => {
            out.extend_from_slice(&LABELED_DARY);
            push_u32(&mut out, d as u32);
            let mut slots = vec![None; d];
            let mut stack = vec![Some(0usize)];
            while let Some(entry) = stack.pop() {
                let Some(v) = entry else {
                    push_u32(&mut out, 0);
                    continue;
                };
                push_u32(&mut out, v as u32 + 1);
                slots.iter_mut().for_each(|s| *s = None);
                for c in tree.children(v) {
                    slots[tree.position(c).unwrap()] = Some(c);
                }
                stack.extend(slots.iter().rev().copied());
            }
        }
        None => {
            out.extend_from_slice(&LABELED_PLANE);
            let mut stack = vec![0usize];
            let mut kids = Vec::new();
            while let Some(v) = stack.pop() {
                push_u32(&mut out, v as u32 + 1);
                kids.clear();
                kids.extend(tree.children(v));
                push_u32(&mut out, kids.len() as u32);
                stack.extend(kids.iter().rev());
            }
        }
    }
    CanonicalForm { bytes: out }
}

/// Shape bytes of the fringe subtree at `root`.
pub(crate) fn shape_bytes<T: IncreasingTree>(tree: &T, root: usize) -> Vec<u8> {
    let verts = super::subtree_vertices(tree, root);
    let mut forms: rustc_hash::FxHashMap<usize, Vec<u8>> = Default::default();
    let mut out = vec![SHAPE];
    for &v in verts.iter().rev() {
        let mut kids: Vec<Vec<u8>> = tree.children(v).map(|c| forms.remove(&c).unwrap()).collect();
        kids.sort_unstable();
        let mut s = Vec::with_capacity(2 + kids.iter().map(Vec::len).sum::<usize>());
        s.push(b'(');
        kids.iter().for_each(|k| s.extend_from_slice(k));
        s.push(b')');
        forms.insert(v, s);
    }
    out.extend_from_slice(&forms[&root]);
    out
}

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn equivalence(&self) -> Equivalence {
        if self.bytes.first() == Some(&SHAPE) {
            Equivalence::Shape
        } else {
            Equivalence::Labeled
        }
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        let form = CanonicalForm { bytes };
        form.decode()?;
        Ok(form)
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Reconstructs a representative tree. Labelled forms give back the tree
    /// with labels `1..=n`; shape forms give a plane tree labelled in preorder.
    pub fn decode(&self) -> Result<AnyTree> {
        let bad = |offset: usize, message: &str| Error::Parse { offset, message: message.into() };
        let b = &self.bytes;
        if b.first() == Some(&SHAPE) {
            let mut records: Vec<(u32, Option<usize>)> = Vec::new();
            let mut stack: Vec<usize> = Vec::new();
            for (i, &c) in b.iter().enumerate().skip(1) {
                match c {
                    b'(' => {
                        if !records.is_empty() && stack.is_empty() {
                            return Err(bad(i, "more than one root"));
                        }
                        records.push((records.len() as u32 + 1, stack.last().copied()));
                        stack.push(records.len() - 1);
                    }
                    b')' => {
                        stack.pop().ok_or_else(|| bad(i, "unbalanced `)`"))?;
                    }
                    _ => return Err(bad(i, "unexpected byte in shape form")),
                }
            }
            if !stack.is_empty() || records.is_empty() {
                return Err(bad(b.len(), "unterminated shape form"));
            }
            return PlaneTree::from_records(&records).map(AnyTree::Plane);
        }
        let mut pos = 2;
        let next = |pos: &mut usize| -> Result<u32> {
            let chunk = b.get(*pos..*pos + 4).ok_or_else(|| bad(*pos, "truncated labelled form"))?;
            *pos += 4;
            Ok(u32::from_le_bytes(chunk.try_into().unwrap()))
        };
        let tree = match b.get(..2) {
            Some(h) if h == LABELED_DARY => {
                let d = next(&mut pos)? as usize;
                let mut records: Vec<(u32, Option<usize>, usize)> = Vec::new();
                // (parent record, slot) for every pending entry
                let mut stack: Vec<(Option<usize>, usize)> = vec![(None, 0)];
                while let Some((parent, slot)) = stack.pop() {
                    let token = next(&mut pos)?;
                    if token == 0 {
                        if parent.is_none() {
                            return Err(bad(pos, "empty root"));
                        }
                        continue;
                    }
                    records.push((token, parent, slot));
                    let me = records.len() - 1;
                    stack.extend((0..d).rev().map(|s| (Some(me), s)));
                }
                AnyTree::Dary(DAryTree::from_records(d, &records)?)
            }
            Some(h) if h == LABELED_PLANE => {
                let mut records: Vec<(u32, Option<usize>)> = Vec::new();
                let mut pending: Vec<Option<usize>> = vec![None];
                while let Some(parent) = pending.pop() {
                    let token = next(&mut pos)?;
                    let kids = next(&mut pos)? as usize;
                    records.push((token, parent));
                    if kids > b.len() {
                        return Err(bad(pos, "child count out of range"));
                    }
                    let me = records.len() - 1;
                    pending.extend(std::iter::repeat_n(Some(me), kids));
                }
                AnyTree::Plane(PlaneTree::from_records(&records)?)
            }
            _ => return Err(bad(0, "unknown canonical form header")),
        };
        if pos != b.len() {
            return Err(bad(pos, "trailing bytes"));
        }
        if canonical_form(&tree, Equivalence::Labeled) != *self {
            return Err(bad(0, "labelled form is not canonical"));
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_dary, enumerate_plane};
    use std::collections::HashSet;

    #[test]
    fn single_vertex_constants() {
        let a = DAryTree::single(2).unwrap();
        let p = PlaneTree::single();
        assert_eq!(canonical_form(&a, Equivalence::Shape).as_bytes(), b"S()");
        assert_eq!(canonical_form(&p, Equivalence::Shape).as_bytes(), b"S()");
        assert_eq!(
            canonical_form(&a, Equivalence::Labeled).as_bytes(),
            &[b'L', b'D', 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]
        );
    }

    #[test]
    fn left_and_right_child() {
        let mut l = DAryTree::single(2).unwrap();
        l.attach(0, 0).unwrap();
        let mut r = DAryTree::single(2).unwrap();
        r.attach(0, 1).unwrap();
        assert_ne!(canonical_form(&l, Equivalence::Labeled), canonical_form(&r, Equivalence::Labeled));
        assert_eq!(canonical_form(&l, Equivalence::Shape), canonical_form(&r, Equivalence::Shape));
    }

    #[test]
    fn shape_counts_of_size_four() {
        // unordered rooted trees on 4 vertices: path, fork below a path,
        // cherry with a pendant, star; the star needs out-degree 3
        let count = |d| {
            enumerate_dary(d, 4)
                .unwrap()
                .iter()
                .map(|t| canonical_form(t, Equivalence::Shape))
                .collect::<HashSet<_>>()
                .len()
        };
        assert_eq!(count(2), 3);
        assert_eq!(count(3), 4);
    }

    #[test]
    fn labeled_forms_are_injective_and_decode() {
        let trees = enumerate_plane(5).unwrap();
        let forms: HashSet<_> = trees.iter().map(|t| canonical_form(t, Equivalence::Labeled)).collect();
        assert_eq!(forms.len(), trees.len());
        for t in enumerate_dary(3, 4).unwrap() {
            let f = canonical_form(&t, Equivalence::Labeled);
            assert_eq!(f.decode().unwrap(), AnyTree::Dary(t.clone()));
        }
    }

    #[test]
    fn relabelling_does_not_change_the_form() {
        let t: PlaneTree = "1(2(4()) 3())".parse().unwrap();
        let u = t.shifted_labels(10);
        for eq in [Equivalence::Labeled, Equivalence::Shape] {
            assert_eq!(canonical_form(&t, eq), canonical_form(&u, eq));
        }
    }

    #[test]
    fn rejects_garbage() {
        for bytes in [vec![], b"X".to_vec(), b"S(".to_vec(), b"S()()".to_vec(), b"LP".to_vec(), b"S)".to_vec()] {
            assert!(CanonicalForm::from_bytes(bytes).is_err());
        }
    }
}
