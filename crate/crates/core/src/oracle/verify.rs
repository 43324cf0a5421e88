//! Checks of the growth processes and of the exact mean formula.

use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::constants::{exact_mean, ExpectedTollProfile};
use crate::error::{invalid, Result};
use crate::functional::TollSpec;
use crate::model::{alpha_big, Model};
use crate::tree::{
    canonical_form, enumerate_dary, for_each_plane, gport_total_weight, grow_dary, tree_probability, weight_port,
    AnyTree, DAryTree, EnumerationLimits, Equivalence,
};

use super::exact_distribution;

/// Absolute tolerance of the mean identity check.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Significance level of the uniformity test.
const UNIFORMITY_ALPHA: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub d: usize,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub cells: usize,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// `chi_square` below the 0.999 quantile.
    pub passed: bool,
}

/// Chi-square test of `grow_dary` against the uniform law on all trees of size `n`.
pub fn verify_uniformity(d: usize, n: usize, samples: u64, seed: u64) -> Result<UniformityReport> {
    chi_square_uniformity(d, n, samples, seed, |rng| grow_dary(d, n, rng))
}

/// Chi-square test of an arbitrary generator of d-ary trees of size `n`.
pub fn chi_square_uniformity<G>(d: usize, n: usize, samples: u64, seed: u64, mut generate: G) -> Result<UniformityReport>
where
    G: FnMut(&mut ChaCha8Rng) -> Result<DAryTree>,
{
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let trees = enumerate_dary(d, n)?;
    let index: FxHashMap<Vec<u8>, usize> = trees
        .iter()
        .enumerate()
        .map(|(i, t)| (canonical_form(t, Equivalence::Labeled).as_bytes().to_vec(), i))
        .collect();
    let mut counts = vec![0u64; trees.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let t = generate(&mut rng)?;
        let key = canonical_form(&t, Equivalence::Labeled);
        let i = *index
            .get(key.as_bytes())
            .ok_or_else(|| invalid(format!("generator produced a tree outside the model: {t}")))?;
        counts[i] += 1;
    }
    let expected = samples as f64 / trees.len() as f64;
    let chi_square: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = trees.len() - 1;
    let p_value = if dof == 0 { 1.0 } else { ChiSquared::new(dof as f64).unwrap().sf(chi_square) };
    Ok(UniformityReport {
        d,
        n,
        samples,
        seed,
        cells: trees.len(),
        chi_square,
        degrees_of_freedom: dof,
        p_value,
        passed: p_value > UNIFORMITY_ALPHA,
    })
}

/// A deliberately non-uniform d-ary growth: with probability `bias` the new
/// vertex takes the oldest free slot. Serves as a negative control.
pub fn grow_dary_biased<R: Rng + ?Sized>(d: usize, n: usize, bias: f64, rng: &mut R) -> Result<DAryTree> {
    let mut tree = DAryTree::single(d)?;
    for _ in 1..n {
        let free: Vec<(usize, usize)> = tree.free_slots().collect();
        let pick = if rng.random::<f64>() < bias { 0 } else { rng.random_range(0..free.len()) };
        let (v, s) = free[pick];
        tree.attach(v, s)?;
    }
    Ok(tree)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelProbabilityReport {
    pub alpha: String,
    pub n: usize,
    pub trees: u64,
    pub total_weight: String,
    /// Trees where `P(T) * total != w(T)`.
    pub mismatches: Vec<String>,
    /// `sum_T P(T) == 1`.
    pub probabilities_sum_to_one: bool,
    pub passed: bool,
}

/// Checks `P(T) * sum_T' w(T') = w(T)` exactly for every PORT of size `n`, with
/// `P` the growth-process probability of the GPORT model.
pub fn verify_model_probability(alpha: Rational64, n: usize) -> Result<ModelProbabilityReport> {
    let model = Model::gport(alpha)?;
    let a = alpha_big(alpha);
    let total = gport_total_weight(&a, n);
    let mut mismatches = Vec::new();
    let mut sum = BigRational::zero();
    let mut trees = 0u64;
    let mut failure = None;
    for_each_plane(n, &EnumerationLimits::default(), |t| {
        trees += 1;
        let p = match tree_probability(&model, &AnyTree::Plane(t.clone())) {
            Ok(p) => p,
            Err(e) => {
                failure.get_or_insert(e);
                return;
            }
        };
        if &p * &total != weight_port(&a, t) && mismatches.len() < 16 {
            mismatches.push(t.to_string());
        }
        sum += p;
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let probabilities_sum_to_one = sum == BigRational::one();
    Ok(ModelProbabilityReport {
        alpha: alpha.to_string(),
        n,
        trees,
        total_weight: total.to_string(),
        passed: mismatches.is_empty() && probabilities_sum_to_one,
        mismatches,
        probabilities_sum_to_one,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanFormulaReport {
    pub model: Model,
    pub toll: String,
    pub n: usize,
    /// From the per-size toll expectations.
    pub formula: f64,
    /// From the exact distribution of `F(T_n)`.
    pub enumerated: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares the exact mean formula against the mean of the enumerated
/// distribution of `F(T_n)`.
pub fn verify_mean_formula(model: &Model, toll: &TollSpec, n: usize) -> Result<MeanFormulaReport> {
    let profile = ExpectedTollProfile::exact(model, toll, n, &EnumerationLimits::default())?;
    let formula = exact_mean(&profile, n)?;
    let enumerated = exact_distribution(model, toll, n)?.mean();
    let abs_diff = (formula - enumerated).abs();
    Ok(MeanFormulaReport {
        model: *model,
        toll: toll.to_string(),
        n,
        formula,
        enumerated,
        abs_diff,
        tolerance: MEAN_TOLERANCE,
        passed: abs_diff <= MEAN_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_uniformity_passes() {
        let r = verify_uniformity(2, 4, 24_000, 7).unwrap();
        assert_eq!(r.cells, 24);
        assert!(r.passed, "{r:?}");
        assert!(verify_uniformity(2, 1, 10, 1).unwrap().passed);
    }

    #[test]
    fn biased_generator_fails() {
        let r = chi_square_uniformity(2, 4, 24_000, 7, |rng| grow_dary_biased(2, 4, 0.3, rng)).unwrap();
        assert!(r.p_value < 1e-6, "{r:?}");
    }

    #[test]
    fn port_probabilities() {
        let r = verify_model_probability(Rational64::from_integer(1), 4).unwrap();
        assert_eq!(r.trees, 15);
        assert!(r.passed);
        assert!(verify_model_probability(Rational64::new(1, 2), 3).unwrap().passed);
        assert_eq!(verify_model_probability(Rational64::from_integer(2), 2).unwrap().trees, 1);
    }

    #[test]
    fn mean_formula_examples() {
        let d2 = Model::Dary { d: 2 };
        assert!(verify_mean_formula(&d2, &TollSpec::leaf(), 6).unwrap().passed);
        assert!(verify_mean_formula(&Model::Dary { d: 3 }, &TollSpec::outdegree(1), 5).unwrap().passed);
        let c = verify_mean_formula(&d2, &TollSpec::constant(1.0).unwrap(), 4).unwrap();
        assert_eq!(c.enumerated, 4.0);
    }

    #[test]
    fn gport_mean_formula() {
        let m = Model::gport(Rational64::new(1, 2)).unwrap();
        for toll in [TollSpec::leaf(), TollSpec::path_length(), TollSpec::log_root_subtrees()] {
            let r = verify_mean_formula(&m, &toll, 5).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
