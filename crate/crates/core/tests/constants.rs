mod common;

use common::builtin_tolls;
use inctree::constants::*;
use inctree::oracle::exact_moments;
use inctree::tree::{AnyTree, EnumerationLimits};
use inctree::{Model, TollSpec};
use num_rational::Rational64;

fn size_only_tolls() -> Vec<TollSpec> {
    vec![
        TollSpec::leaf(),
        TollSpec::path_length(),
        TollSpec::shape(),
        TollSpec::fringe_size(2).unwrap(),
        TollSpec::fringe_size(4).unwrap(),
        TollSpec::constant(1.0).unwrap(),
    ]
}

#[test]
fn mu_routes_agree() {
    let limits = EnumerationLimits::default();
    for model in [Model::Dary { d: 2 }, Model::Dary { d: 3 }, Model::gport(Rational64::new(1, 2)).unwrap()] {
        let k = limits.max_size(&model).min(7);
        for toll in size_only_tolls() {
            let by_trees = mu_enumeration(&model, &toll, k).unwrap();
            let profile = ExpectedTollProfile::exact(&model, &toll, k, &limits).unwrap();
            let by_size = mu_size_series(&profile, k).unwrap();
            for (a, b) in by_trees.mu_sequence.iter().zip(&by_size.mu_sequence) {
                assert!((a - b).abs() < 1e-12, "{model} {toll}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn constant_toll_telescopes() {
    for d in [2usize, 3, 4] {
        let model = Model::Dary { d };
        let c = mu_enumeration(&model, &TollSpec::constant(1.0).unwrap(), 5).unwrap();
        let mut prev = 0.0;
        for (i, mu) in c.mu_sequence.iter().enumerate() {
            let k = (i + 1) as f64;
            let tail = d as f64 / ((d - 1) as f64 * (k + 1.0) + 1.0);
            assert!((1.0 - mu - tail).abs() < 1e-14);
            assert!(*mu > prev);
            prev = *mu;
        }
        let p = ExpectedTollProfile::exact(&model, &TollSpec::constant(1.0).unwrap(), 2000, &EnumerationLimits::default())
            .unwrap();
        let s = mu_size_series(&p, 2000).unwrap();
        assert!((1.0 - s.mu - s.tail_bound.unwrap()).abs() < 1e-12);
    }
    let g = mu_enumeration(&Model::port(), &TollSpec::constant(1.0).unwrap(), 7).unwrap();
    assert!((1.0 - g.mu - g.tail_bound.unwrap()).abs() < 1e-14);
}

#[test]
fn kernel_routes_agree() {
    for d in [2, 3, 4] {
        let k = Kernel::dary(d).unwrap();
        for kk in [1, 3, 8, 20] {
            for x in [0.0, 0.05, 0.5, 0.95] {
                let a = k.eval_closed_form(kk, x).unwrap();
                let b = k.eval_quadrature(kk, x).unwrap();
                assert!((a - b).abs() < 1e-10, "d={d} k={kk} x={x}");
            }
        }
        for (k1, k2) in [(1, 1), (1, 2), (4, 7), (20, 20)] {
            assert!((k.inner_product(k1, k2) - k.inner_product_quadrature(k1, k2)).abs() < 1e-10);
        }
    }
    let x = 0.3;
    let ip = phi_inner_product(2, 1, 2).unwrap();
    assert_eq!(ip, phi_inner_product(2, 2, 1).unwrap());
    assert!((phi(2, 1, x).unwrap() - (1.0 - x) * (1.0 - x) / 3.0).abs() < 1e-15);
}

#[test]
fn exact_mean_matches_enumeration() {
    let limits = EnumerationLimits::default();
    for d in [2, 3] {
        let model = Model::Dary { d };
        for toll in builtin_tolls(d) {
            let profile = ExpectedTollProfile::exact(&model, &toll, 7, &limits).unwrap();
            for n in 1..=7 {
                let formula = exact_mean(&profile, n).unwrap();
                let brute = exact_moments(&model, &toll, n, 1).unwrap().raw;
                assert!((formula - brute).abs() < 1e-12 * brute.abs().max(1.0), "d={d} {toll} n={n}");
            }
        }
    }
}

#[test]
fn mean_shape_identity() {
    // with K = n: E F(T_n) - mu_n (n + 1/(d-1)) = E f(T_n) (d-1)n / ((d-1)n + d)
    let limits = EnumerationLimits::default();
    for d in [2usize, 3] {
        let model = Model::Dary { d };
        let a = (d - 1) as f64;
        for toll in builtin_tolls(d).into_iter().filter(|t| t.is_bounded_for(&model)) {
            let profile = ExpectedTollProfile::exact(&model, &toll, 7, &limits).unwrap();
            for n in 1..=7 {
                let mu = mu_enumeration(&model, &toll, n).unwrap();
                let gap = exact_mean(&profile, n).unwrap() - mu.predicted_mean(n);
                let ef = profile.get(n).unwrap().value;
                let nn = n as f64;
                assert!((gap - ef * a * nn / (a * nn + d as f64)).abs() < 1e-12, "d={d} {toll} n={n}");
                assert!(gap.abs() <= ef.abs() + 1e-12);
            }
        }
    }
}

#[test]
fn closed_forms_match_enumeration() {
    let leaf = sigma2_enumeration(&Model::Dary { d: 2 }, &TollSpec::leaf(), 5).unwrap();
    let closed = fringe_constants(2, &FringeMode::Size(1)).unwrap();
    assert!((leaf.sigma2.unwrap() - closed.sigma2.unwrap()).abs() < 1e-10);
    for (d, k) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let closed = fringe_constants(d, &FringeMode::Size(k)).unwrap();
        let enumerated = sigma2_enumeration(&Model::Dary { d }, &TollSpec::fringe_size(k).unwrap(), k + 1).unwrap();
        assert!((closed.mu - enumerated.mu).abs() < 1e-12, "d={d} k={k}");
        assert!((closed.sigma2.unwrap() - enumerated.sigma2.unwrap()).abs() < 1e-12, "d={d} k={k}");
    }
    let s = AnyTree::parse("1[0:2[0:_, 1:3[0:_, 1:_]], 1:_]").unwrap();
    let closed = fringe_constants(2, &FringeMode::Occurrence(s.clone())).unwrap();
    let enumerated = sigma2_enumeration(&Model::Dary { d: 2 }, &TollSpec::fringe_occurrence(&s).unwrap(), 4).unwrap();
    assert!((closed.mu - 1.0 / 60.0).abs() < 1e-15);
    assert!((closed.sigma2.unwrap() - enumerated.sigma2.unwrap()).abs() < 1e-12);
    let single = fringe_constants(2, &FringeMode::Occurrence(AnyTree::parse("1[0:_, 1:_]").unwrap())).unwrap();
    assert_eq!(single.sigma2, closed_leaf());
}

fn closed_leaf() -> Option<f64> {
    fringe_constants(2, &FringeMode::Size(1)).unwrap().sigma2
}

#[test]
fn constant_toll_variance_vanishes() {
    let c = sigma2_enumeration(&Model::Dary { d: 2 }, &TollSpec::constant(1.0).unwrap(), 7).unwrap();
    let seq = c.sigma2_sequence;
    assert!(seq[6].abs() < seq[2].abs());
    assert!(seq[6].abs() < 0.05, "{seq:?}");
}

#[test]
fn ternary_size_two_series() {
    let model = Model::Dary { d: 3 };
    let toll = TollSpec::fringe_size(2).unwrap();
    let p = ExpectedTollProfile::exact(&model, &toll, 6, &EnumerationLimits::default()).unwrap();
    assert!((mu_size_series(&p, 6).unwrap().mu - 6.0 / 35.0).abs() < 1e-15);
}

#[test]
fn port_leaf_mean_slope() {
    let c = sigma2_enumeration(&Model::port(), &TollSpec::leaf(), 4).unwrap();
    for n in 2..=8 {
        let exact = exact_moments(&Model::port(), &TollSpec::leaf(), n, 1).unwrap().raw;
        assert!((exact - c.predicted_mean(n)).abs() < 1e-12, "n={n}");
    }
}
