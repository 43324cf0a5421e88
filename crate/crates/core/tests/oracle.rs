use inctree::oracle::*;
use inctree::tree::{enumerate, grow, tree_probability, EnumerationLimits, Equivalence};
use inctree::tree::canonical_form;
use inctree::{Model, TollSpec};
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::HashMap;

fn models() -> Vec<Model> {
    vec![
        Model::Dary { d: 2 },
        Model::Dary { d: 3 },
        Model::Dary { d: 4 },
        Model::Recursive,
        Model::port(),
        Model::gport(Rational64::from_integer(2)).unwrap(),
        Model::gport(Rational64::new(1, 2)).unwrap(),
    ]
}

#[test]
fn distributions_sum_to_one() {
    for model in models() {
        for n in 1..=6 {
            let dist = exact_distribution(&model, &TollSpec::log_root_subtrees(), n).unwrap();
            assert_eq!(dist.total_probability(), BigRational::one(), "{model} n={n}");
            assert!(dist.support.len() as u64 <= dist.trees);
        }
    }
}

#[test]
fn mean_formula_holds_for_every_builtin() {
    let tolls = [
        TollSpec::leaf(),
        TollSpec::outdegree(1),
        TollSpec::path_length(),
        TollSpec::shape(),
        TollSpec::fringe_size(3).unwrap(),
        TollSpec::log_root_subtrees(),
        TollSpec::log_branch_symmetry(Default::default()),
        TollSpec::orbits(Default::default()),
        TollSpec::constant(-1.5).unwrap(),
    ];
    for model in [Model::port(), Model::gport(Rational64::new(3, 2)).unwrap()] {
        for toll in &tolls {
            let r = verify_mean_formula(&model, toll, 6).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}

#[test]
fn leaf_variance_trend() {
    let v = exact_moments(&Model::Dary { d: 2 }, &TollSpec::leaf(), 7, 2).unwrap().central;
    assert!((v - 2.0 * 7.0 / 45.0).abs() < 0.1, "{v}");
}

#[test]
fn gport_growth_matches_model_probabilities() {
    let model = Model::gport(Rational64::new(1, 2)).unwrap();
    let n = 5;
    let trees = enumerate(&model, n, &EnumerationLimits::default()).unwrap();
    let index: HashMap<Vec<u8>, usize> = trees
        .iter()
        .enumerate()
        .map(|(i, t)| (canonical_form(t, Equivalence::Labeled).as_bytes().to_vec(), i))
        .collect();
    let probs: Vec<f64> = trees.iter().map(|t| tree_probability(&model, t).unwrap().to_f64().unwrap()).collect();
    let samples = 200_000;
    let mut counts = vec![0u64; trees.len()];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..samples {
        let t = grow(&model, n, &mut rng).unwrap();
        counts[index[canonical_form(&t, Equivalence::Labeled).as_bytes()]] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| (c as f64 - p * samples as f64).powi(2) / (p * samples as f64))
        .sum();
    let p_value = ChiSquared::new((trees.len() - 1) as f64).unwrap().sf(chi2);
    assert!(p_value > 1e-3, "chi2 {chi2}, p {p_value}");
}

#[test]
fn uniformity_harness() {
    assert!(verify_uniformity(2, 4, 24_000, 3).unwrap().passed);
    let biased = chi_square_uniformity(3, 4, 30_000, 3, |rng| grow_dary_biased(3, 4, 0.2, rng)).unwrap();
    assert!(biased.p_value < 1e-6);
}

#[test]
fn gport_identities() {
    let r = verify_model_probability(Rational64::from_integer(1), 4).unwrap();
    assert_eq!(r.trees, 15);
    assert!(r.passed);
    for alpha in [Rational64::from_integer(2), Rational64::new(1, 2)] {
        for n in 1..=5 {
            assert!(verify_model_probability(alpha, n).unwrap().passed);
        }
    }
}

#[test]
fn csv_export() {
    let dist = exact_distribution(&Model::Dary { d: 2 }, &TollSpec::leaf(), 3).unwrap();
    assert_eq!(dist.to_csv(), "value,probability_numerator,probability_denominator\n1,2,3\n2,1,3\n");
}
