mod common;

use common::builtin_tolls;
use inctree::constants::{fringe_constants, sigma2_enumeration, FringeMode};
use inctree::montecarlo::*;
use inctree::oracle::exact_distribution;
use inctree::{Model, TollSpec};
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn merging_is_order_independent(xs in prop::collection::vec(-1e3f64..1e3, 3..200), cut1 in 0usize..100, cut2 in 0usize..100) {
        let n = xs.len();
        let (i, j) = ((cut1 % n).min(cut2 % n), (cut1 % n).max(cut2 % n));
        let parts = [&xs[..i], &xs[i..j], &xs[j..]].map(|p| SampleStats::from_values(1, p));
        let whole = SampleStats::from_values(1, &xs);
        for order in [[0, 1, 2], [2, 1, 0], [1, 0, 2]] {
            let mut acc = SampleStats::new(1);
            for k in order {
                acc.merge(&parts[k]).unwrap();
            }
            prop_assert_eq!(acc.count, whole.count);
            for (a, b) in [(acc.mean, whole.mean), (acc.m2, whole.m2), (acc.m3, whole.m3), (acc.m4, whole.m4)] {
                prop_assert!(close(a, b), "{} vs {}", a, b);
            }
            prop_assert!(acc.variance() >= 0.0);
        }
        // left- and right-nested merges
        let mut left = parts[0].clone();
        left.merge(&parts[1]).unwrap();
        left.merge(&parts[2]).unwrap();
        let mut right = parts[1].clone();
        right.merge(&parts[2]).unwrap();
        let mut outer = parts[0].clone();
        outer.merge(&right).unwrap();
        prop_assert!(close(left.m4, outer.m4) && close(left.m2, outer.m2));
    }
}

#[test]
fn reruns_are_bit_identical() {
    let cfg = SimConfig::new(Model::Dary { d: 3 }, 200, 3000, 42)
        .workers(4)
        .histogram(HistogramPlan::Auto { bins: 51, lattice: Some(1.0), center: None, sd: None });
    let a = serde_json::to_string(&simulate(&cfg, &TollSpec::leaf()).unwrap()).unwrap();
    let b = serde_json::to_string(&simulate(&cfg, &TollSpec::leaf()).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = simulate(&SimConfig { seed: 43, ..cfg.clone() }, &TollSpec::leaf()).unwrap();
    assert_ne!(serde_json::to_string(&other).unwrap(), a);
}

#[test]
fn leaf_mean_at_size_five() {
    let cfg = SimConfig::new(Model::Dary { d: 2 }, 5, 1_000_000, 5).workers(2);
    let s = simulate(&cfg, &TollSpec::leaf()).unwrap();
    assert!((s.mean - 2.0).abs() < 5.0 * s.std_error_of_mean(), "{}", s.mean);
}

#[test]
fn monte_carlo_means_match_exact_means() {
    for model in [Model::Dary { d: 2 }, Model::Dary { d: 3 }] {
        let d = match model {
            Model::Dary { d } => d,
            _ => unreachable!(),
        };
        for toll in builtin_tolls(d) {
            let exact = exact_distribution(&model, &toll, 6).unwrap().mean();
            let s = simulate(&SimConfig::new(model, 6, 20_000, 17), &toll).unwrap();
            let se = s.std_error_of_mean();
            assert!((s.mean - exact).abs() <= 5.0 * se + 1e-9, "{model} {toll}: {} vs {exact}", s.mean);
        }
    }
    for toll in [TollSpec::leaf(), TollSpec::log_root_subtrees(), TollSpec::orbits(Default::default())] {
        let exact = exact_distribution(&Model::port(), &toll, 6).unwrap().mean();
        let s = simulate(&SimConfig::new(Model::port(), 6, 20_000, 3), &toll).unwrap();
        assert!((s.mean - exact).abs() <= 5.0 * s.std_error_of_mean() + 1e-9, "PORT {toll}");
    }
}

#[test]
fn monte_carlo_profile_matches_exact() {
    let model = Model::Dary { d: 2 };
    let toll = TollSpec::log_root_subtrees();
    let mc = expected_toll_profile_mc(&model, &toll, 6, 20_000, 8, 0).unwrap();
    let exact = inctree::constants::ExpectedTollProfile::exact(&model, &toll, 6, &Default::default()).unwrap();
    for (a, b) in mc.entries.iter().zip(&exact.entries) {
        let se = match a.provenance {
            inctree::constants::Provenance::Mc { std_error, .. } => std_error,
            _ => panic!("expected Monte Carlo entries"),
        };
        assert!((a.value - b.value).abs() <= 4.0 * se + 1e-12, "m={}", a.size);
    }
}

#[test]
fn variance_growth_matches_sigma2() {
    for (d, toll) in [
        (2, TollSpec::leaf()),
        (3, TollSpec::leaf()),
        (2, TollSpec::fringe_size(2).unwrap()),
    ] {
        let model = Model::Dary { d };
        let c = sigma2_enumeration(&model, &toll, 4).unwrap();
        let sigma2 = c.sigma2.unwrap();
        for (n, samples) in [(1000, 20_000u64), (10_000, 5_000)] {
            let s = simulate(&SimConfig::new(model, n, samples, 99), &toll).unwrap();
            let per_n = s.variance() / n as f64;
            let se = s.std_error_of_variance() / n as f64;
            assert!((per_n - sigma2).abs() < 3.0 * se, "d={d} {toll} n={n}: {per_n} vs {sigma2} (se {se})");
        }
    }
    assert!((fringe_constants(2, &FringeMode::Size(1)).unwrap().sigma2.unwrap() - 2.0 / 45.0).abs() < 1e-15);
}

#[test]
fn constant_toll_is_flagged_degenerate() {
    let s = simulate(&SimConfig::new(Model::Dary { d: 2 }, 100, 100, 1), &TollSpec::constant(1.0).unwrap()).unwrap();
    assert_eq!(s.variance(), 0.0);
    assert!(normality_report(&s, None).sigma_zero);
}

#[test]
fn decay_estimates() {
    let model = Model::Dary { d: 2 };
    let sizes = [10, 30, 100, 300, 1000];
    let r = estimate_toll_decay(&model, &TollSpec::log_root_subtrees(), &sizes, 400, 2).unwrap();
    for p in &r.points {
        assert!(p.mean_abs <= (1.0 + 1.0 / p.size as f64).ln());
    }
    assert!(r.decreasing);
    assert!(r.log_log_slope.unwrap() < -0.5);
    let sym = estimate_toll_decay(&model, &TollSpec::log_branch_symmetry(Default::default()), &[11, 21, 41, 81], 2000, 2)
        .unwrap();
    assert_eq!(sym.points.len(), 4);
    assert!(sym.points[0].mean_abs > sym.points[3].mean_abs);
}
