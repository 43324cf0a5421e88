//! Exact counts, GPORT weights and exact model probabilities.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::model::{alpha_big, Model};

use super::{AnyTree, IncreasingTree, PlaneTree};

/// Number of d-ary increasing trees with `n` vertices: `prod_{j=1}^{n-1} ((d-1)j + 1)`.
pub fn count_dary(d: usize, n: usize) -> BigUint {
    (1..n).fold(BigUint::one(), |acc, j| acc * BigUint::from((d - 1) * j + 1))
}

/// Number of PORTs with `n` vertices, `(2n - 3)!!`.
pub fn count_plane(n: usize) -> BigUint {
    (1..n).fold(BigUint::one(), |acc, j| acc * BigUint::from(2 * j - 1))
}

/// Number of recursive trees with `n` vertices, `(n - 1)!`.
pub fn count_recursive(n: usize) -> BigUint {
    (1..n).fold(BigUint::one(), |acc, j| acc * BigUint::from(j))
}

/// Total GPORT weight of all PORTs with `n` vertices: `prod_{j=1}^{n-1} ((alpha+1)j - 1)`.
pub fn gport_total_weight(alpha: &BigRational, n: usize) -> BigRational {
    let one = BigRational::one();
    (1..n).fold(one.clone(), |acc, j| {
        acc * ((alpha + &one) * BigRational::from_integer(BigInt::from(j)) - &one)
    })
}

/// `C(alpha + j - 1, j) = prod_{i<j} (alpha + i) / j!`.
fn rising_binomial(alpha: &BigRational, j: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..j {
        acc *= alpha + BigRational::from_integer(BigInt::from(i));
        acc /= BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

/// GPORT weight `w(T) = prod_j C(alpha+j-1, j)^{N_j(T)}`, with `N_j` the number
/// of vertices of out-degree `j`.
pub fn weight_port(alpha: &BigRational, tree: &PlaneTree) -> BigRational {
    let mut by_degree: Vec<usize> = Vec::new();
    for v in 0..tree.len() {
        let j = tree.out_degree(v);
        if by_degree.len() <= j {
            by_degree.resize(j + 1, 0);
        }
        by_degree[j] += 1;
    }
    by_degree
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &count)| count > 0)
        .fold(BigRational::one(), |acc, (j, &count)| {
            acc * num_traits::pow(rising_binomial(alpha, j), count)
        })
}

/// For every non-root vertex `c`: the parent's out-degree just before `c`
/// arrived, and the gap `c` occupies among the siblings present at that time.
fn insertion_history(tree: &PlaneTree) -> Vec<(usize, usize)> {
    let mut hist = vec![(0, 0); tree.len()];
    for p in 0..tree.len() {
        let kids = tree.child_list(p);
        for (i, &c) in kids.iter().enumerate() {
            let older = kids.iter().filter(|&&o| o < c).count();
            let gap = kids[..i].iter().filter(|&&o| o < c).count();
            hist[c as usize] = (older, gap);
        }
    }
    hist
}

/// Exact probability that the model's growth process produces `tree`.
///
/// Labels fix the insertion order, so this is a product of one attachment
/// probability per inserted vertex.
pub fn tree_probability(model: &Model, tree: &AnyTree) -> Result<BigRational> {
    model.validate()?;
    let int = |k: usize| BigRational::from_integer(BigInt::from(k));
    let mut p = BigRational::one();
    match (model, tree) {
        (Model::Dary { d }, AnyTree::Dary(t)) => {
            if t.d() != *d {
                return Err(invalid(format!("tree has arity {}, model has {d}", t.d())));
            }
            for k in 1..t.len() {
                p /= int((d - 1) * k + 1);
            }
        }
        (Model::Recursive, AnyTree::Plane(t)) => {
            for (k, &(older, gap)) in insertion_history(t).iter().enumerate().skip(1) {
                if gap != older {
                    return Ok(BigRational::zero());
                }
                p /= int(k);
            }
        }
        (Model::Gport { alpha }, AnyTree::Plane(t)) => {
            let alpha = alpha_big(*alpha);
            for (k, &(older, _)) in insertion_history(t).iter().enumerate().skip(1) {
                let numer = &alpha + int(older);
                let denom = (&alpha * int(k) + int(k - 1)) * int(older + 1);
                p = p * numer / denom;
            }
        }
        _ => return Err(invalid(format!("tree kind does not match model {model}"))),
    }
    Ok(p)
}
