//! Tree statistics behind the catalog tolls, computed directly on whole trees.

use num_bigint::BigUint;
use num_traits::One;

use crate::tree::{Equivalence, IncreasingTree};

use super::index::{FringeIndex, Needs};
use super::toll::TollSpec;

/// Number of subtrees containing the root: `s(T) = prod_j (1 + s(B_j))`.
pub fn subtree_count_root<T: IncreasingTree>(tree: &T) -> BigUint {
    let n = tree.len();
    let mut s = vec![BigUint::one(); n];
    for v in (1..n).rev() {
        let p = tree.parent(v).unwrap();
        let factor = std::mem::take(&mut s[v]) + 1u32;
        s[p] *= factor;
    }
    s.swap_remove(0)
}

/// `ln(1 + 1/s(T))`; lies in `(0, ln(1 + 1/|T|)]` because `s(T) >= |T|`.
pub fn log_subtree_toll<T: IncreasingTree>(tree: &T) -> f64 {
    super::engine::toll_at_root(&TollSpec::log_root_subtrees(), tree).expect("built-in toll")
}

fn class_needs(eq: Equivalence) -> Needs {
    match eq {
        Equivalence::Shape => Needs { shape_classes: true, ..Needs::default() },
        Equivalence::Labeled => Needs { labeled_classes: true, ..Needs::default() },
    }
}

fn factorial(m: usize) -> BigUint {
    (2..=m).fold(BigUint::one(), |acc, i| acc * i)
}

fn branch_symmetry_at(index: &FringeIndex, v: usize, eq: Equivalence) -> BigUint {
    let mut classes: Vec<u32> = index.fringe(v).branches().map(|b| b.class(eq)).collect();
    classes.sort_unstable();
    classes.chunk_by(|a, b| a == b).map(|run| factorial(run.len())).product()
}

/// `R(T)`: order of the group permuting the root branches onto isomorphic
/// copies, `prod over classes of (multiplicity)!`.
pub fn branch_symmetry<T: IncreasingTree>(tree: &T, eq: Equivalence) -> BigUint {
    branch_symmetry_at(&FringeIndex::build(tree, class_needs(eq)), 0, eq)
}

/// Order of the automorphism group of the tree's shape, `prod_v R(T_v)`.
pub fn automorphism_group_order<T: IncreasingTree>(tree: &T) -> BigUint {
    let index = FringeIndex::build(tree, class_needs(Equivalence::Shape));
    (0..tree.len()).map(|v| branch_symmetry_at(&index, v, Equivalence::Shape)).product()
}

/// Number of vertex orbits: `1 + sum over distinct branch classes of the
/// orbit count of one representative`.
pub fn orbit_count<T: IncreasingTree>(tree: &T, eq: Equivalence) -> u32 {
    FringeIndex::build(tree, Needs { orbits: Some(eq), ..Needs::default() }).fringe(0).orbit_count()
}

/// Orbit toll at the root: `orbits(T) - sum_j orbits(B_j)`.
pub fn orbit_toll<T: IncreasingTree>(tree: &T, eq: Equivalence) -> f64 {
    super::engine::toll_at_root(&TollSpec::orbits(eq), tree).expect("built-in toll")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{DAryTree, PlaneTree};

    #[test]
    fn subtree_counts() {
        let single = PlaneTree::single();
        assert_eq!(subtree_count_root(&single), BigUint::from(1u32));
        let p2: PlaneTree = "1(2())".parse().unwrap();
        assert_eq!(subtree_count_root(&p2), BigUint::from(2u32));
        let cherry: PlaneTree = "1(2() 3())".parse().unwrap();
        assert_eq!(subtree_count_root(&cherry), BigUint::from(4u32));
        assert!((log_subtree_toll(&single) - 2f64.ln()).abs() < 1e-15);
        assert!((log_subtree_toll(&p2) - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn symmetry_examples() {
        let cherry: DAryTree = "1[0:2[0:_, 1:_], 1:3[0:_, 1:_]]".parse().unwrap();
        assert_eq!(branch_symmetry(&cherry, Equivalence::Shape), BigUint::from(2u32));
        let star: DAryTree = "1[0:2[0:_, 1:_, 2:_], 1:3[0:_, 1:_, 2:_], 2:4[0:_, 1:_, 2:_]]".parse().unwrap();
        assert_eq!(branch_symmetry(&star, Equivalence::Shape), BigUint::from(6u32));
        let path: PlaneTree = "1(2(3(4())))".parse().unwrap();
        assert_eq!(automorphism_group_order(&path), BigUint::one());
    }

    #[test]
    fn labeled_symmetry_distinguishes_label_order() {
        // branches 2(4) and 3(5) have the same relative order; 2(5) and 3(4) too
        let same: PlaneTree = "1(2(4()) 3(5()))".parse().unwrap();
        assert_eq!(branch_symmetry(&same, Equivalence::Labeled), BigUint::from(2u32));
        let leaf_and_path: PlaneTree = "1(2() 3(4()))".parse().unwrap();
        assert_eq!(branch_symmetry(&leaf_and_path, Equivalence::Labeled), BigUint::one());
    }

    #[test]
    fn orbit_examples() {
        let path: PlaneTree = "1(2(3(4(5()))))".parse().unwrap();
        assert_eq!(orbit_count(&path, Equivalence::Shape), 5);
        let cherry: PlaneTree = "1(2() 3())".parse().unwrap();
        assert_eq!(orbit_count(&cherry, Equivalence::Shape), 2);
        let complete: PlaneTree = "1(2(4() 5()) 3(6() 7()))".parse().unwrap();
        assert_eq!(orbit_count(&complete, Equivalence::Shape), 3);
        // isomorphic branches with 2 orbits each: 1 - 2
        assert_eq!(orbit_toll(&complete, Equivalence::Shape), -1.0);
        let lopsided: PlaneTree = "1(2(4()) 3())".parse().unwrap();
        assert_eq!(orbit_toll(&lopsided, Equivalence::Shape), 1.0);
        assert_eq!(orbit_toll(&PlaneTree::single(), Equivalence::Shape), 1.0);
    }
}
