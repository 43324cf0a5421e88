#![allow(dead_code)]

use inctree::tree::{AnyTree, IncreasingTree};
use inctree::TollSpec;

/// One instance of every built-in toll, with patterns matching arity `d`.
pub fn builtin_tolls(d: usize) -> Vec<TollSpec> {
    let pattern = match d {
        2 => "1[0:_, 1:2[0:3[0:_, 1:_], 1:_]]",
        3 => "1[0:_, 1:2[0:_, 1:_, 2:_], 2:3[0:_, 1:_, 2:_]]",
        _ => panic!("no pattern for d = {d}"),
    };
    vec![
        TollSpec::leaf(),
        TollSpec::outdegree(0),
        TollSpec::outdegree(1),
        TollSpec::outdegree(2),
        TollSpec::path_length(),
        TollSpec::shape(),
        TollSpec::fringe_size(1).unwrap(),
        TollSpec::fringe_size(2).unwrap(),
        TollSpec::fringe_size(3).unwrap(),
        TollSpec::fringe_occurrence(&AnyTree::parse(pattern).unwrap()).unwrap(),
        TollSpec::log_root_subtrees(),
        TollSpec::log_branch_symmetry(Default::default()),
        TollSpec::log_branch_symmetry(inctree::tree::Equivalence::Labeled),
        TollSpec::orbits(Default::default()),
        TollSpec::constant(2.5).unwrap(),
        TollSpec::zero(),
    ]
}

/// Heap's algorithm over all permutations of `0..n`.
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    visit(&p);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            visit(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Automorphisms of the unordered rooted shape: vertex permutations fixing
/// the parent relation.
pub fn automorphisms<T: IncreasingTree>(tree: &T) -> Vec<Vec<usize>> {
    let n = tree.len();
    let mut out = Vec::new();
    for_each_permutation(n, |p| {
        let ok = (0..n).all(|v| match tree.parent(v) {
            None => p[v] == v,
            Some(u) => tree.parent(p[v]) == Some(p[u]),
        });
        if ok {
            out.push(p.to_vec());
        }
    });
    out
}

/// Number of orbits of the automorphism group acting on vertices.
pub fn orbit_partition_size<T: IncreasingTree>(tree: &T) -> usize {
    let n = tree.len();
    let autos = automorphisms(tree);
    let mut seen = vec![false; n];
    let mut orbits = 0;
    for v in 0..n {
        if seen[v] {
            continue;
        }
        orbits += 1;
        for a in &autos {
            seen[a[v]] = true;
        }
    }
    orbits
}

/// Connected vertex sets containing the root.
pub fn root_subtrees_brute<T: IncreasingTree>(tree: &T) -> u64 {
    let n = tree.len();
    (0u64..1 << (n - 1))
        .filter(|mask| {
            let inside = |v: usize| v == 0 || mask >> (v - 1) & 1 == 1;
            (1..n).all(|v| !inside(v) || inside(tree.parent(v).unwrap()))
        })
        .count() as u64
}
