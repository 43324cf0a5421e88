//! Brute-force ground truth at small sizes: exact distributions and moments of
//! `F(T_n)` by enumeration, and checks of the growth processes and the mean
//! formula.

mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::functional::{Evaluator, TollSpec};
use crate::model::Model;
use crate::tree::{tree_probability, EnumerationLimits};

pub use verify::{
    chi_square_uniformity, grow_dary_biased, verify_mean_formula, verify_model_probability, verify_uniformity,
    MeanFormulaReport, ModelProbabilityReport, UniformityReport, MEAN_TOLERANCE,
};

/// Values closer than this share one support point.
pub const BUCKET: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportPoint {
    pub value: f64,
    #[serde(serialize_with = "ser_rational")]
    pub probability: BigRational,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Exact law of `F(T_n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactDistribution {
    pub n: usize,
    pub model: Model,
    pub toll: String,
    pub trees: u64,
    /// Sorted by value.
    pub support: Vec<SupportPoint>,
    /// Raw moments `E F^r`, `r = 1..=4`, from unbucketed values.
    pub raw_moments: [f64; 4],
}

/// Moments of `F(T_n)` of a given order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactMoments {
    pub order: u32,
    pub raw: f64,
    pub central: f64,
}

fn compensated_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    *comp += if sum.abs() >= x.abs() { (*sum - t) + x } else { (x - t) + *sum };
    *sum = t;
}

/// Enumerates every tree of size `n`, weights it by its exact probability and
/// tabulates `F`.
pub fn exact_distribution(model: &Model, toll: &TollSpec, n: usize) -> Result<ExactDistribution> {
    exact_distribution_with(model, toll, n, &EnumerationLimits::default())
}

pub fn exact_distribution_with(
    model: &Model,
    toll: &TollSpec,
    n: usize,
    limits: &EnumerationLimits,
) -> Result<ExactDistribution> {
    let mut ev = Evaluator::new(toll);
    let mut buckets: BTreeMap<i64, SupportPoint> = BTreeMap::new();
    let mut sums = [(0.0, 0.0); 4];
    let mut trees = 0u64;
    let mut failure = None;
    let mut visit = |tree: &crate::tree::AnyTree| {
        if failure.is_some() {
            return;
        }
        let mut step = || -> Result<(f64, BigRational)> { Ok((ev.eval(tree)?, tree_probability(model, tree)?)) };
        let (value, p) = match step() {
            Ok(x) => x,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        trees += 1;
        if p.is_zero() {
            return;
        }
        let pf = p.to_f64().unwrap();
        let mut power = 1.0;
        for (sum, comp) in sums.iter_mut() {
            power *= value;
            compensated_add(sum, comp, pf * power);
        }
        let key = (value / BUCKET).round() as i64;
        buckets
            .entry(key)
            .and_modify(|s| s.probability += &p)
            .or_insert(SupportPoint { value, probability: p });
    };
    crate::tree::enumerate_each(model, n, limits, &mut visit)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ExactDistribution {
        n,
        model: *model,
        toll: toll.to_string(),
        trees,
        support: buckets.into_values().collect(),
        raw_moments: sums.map(|(s, c)| s + c),
    })
}

impl ExactDistribution {
    pub fn total_probability(&self) -> BigRational {
        self.support.iter().map(|s| &s.probability).sum()
    }

    pub fn mean(&self) -> f64 {
        self.raw_moments[0]
    }

    /// Central moment of order `r <= 4`.
    pub fn central_moment(&self, r: u32) -> f64 {
        let m = self.raw_moments;
        let mu = m[0];
        match r {
            0 => 1.0,
            1 => 0.0,
            2 => m[1] - mu * mu,
            3 => m[2] - 3.0 * mu * m[1] + 2.0 * mu.powi(3),
            4 => m[3] - 4.0 * mu * m[2] + 6.0 * mu * mu * m[1] - 3.0 * mu.powi(4),
            _ => panic!("central moments are tracked up to order 4"),
        }
    }

    pub fn variance(&self) -> f64 {
        self.central_moment(2)
    }

    /// `value,numerator,denominator` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,probability_numerator,probability_denominator\n");
        for s in &self.support {
            let _ = writeln!(out, "{},{},{}", s.value, s.probability.numer(), s.probability.denom());
        }
        out
    }
}

/// Raw and central moment of order `r` (1 to 4) of `F(T_n)`.
pub fn exact_moments(model: &Model, toll: &TollSpec, n: usize, order: u32) -> Result<ExactMoments> {
    if !(1..=4).contains(&order) {
        return Err(crate::error::invalid(format!("moment order must be 1..=4, got {order}")));
    }
    let dist = exact_distribution(model, toll, n)?;
    Ok(ExactMoments {
        order,
        raw: dist.raw_moments[order as usize - 1],
        central: dist.central_moment(order),
    })
}
