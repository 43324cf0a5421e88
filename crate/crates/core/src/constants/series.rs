//! Truncated series for `mu` and `sigma^2`, the size-indexed series and the
//! exact finite-`n` mean.

use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::error::{invalid, Error, Result};
use crate::functional::{Evaluator, TollSpec};
use crate::model::Model;
use crate::tree::{count_dary, for_each_tree_upto, AnyTree, EnumerationLimits, IncreasingTree};

use super::kernel::Kernel;
use super::profile::{ExpectedTollProfile, Provenance};
use super::{GportKernel, Method, Sigma2Variant, SignConvention, TheoremConstants, Truncation};

/// A step between consecutive `sigma^2` truncations larger than this is
/// reported as a convergence warning.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;

/// Default `sigma^2` truncation for a model.
pub fn default_cutoff(model: &Model) -> usize {
    match model {
        Model::Dary { d: 2 } => 7,
        Model::Dary { d: 3 } => 6,
        Model::Dary { .. } => 5,
        _ => 7,
    }
}

/// Model-specific constants of the two theorems. With rate `r` and offset `c`
/// the size-`k` denominator is `prod_{j<=k} (r j + c)`: `r = d-1, c = d` for
/// d-ary trees and `r = alpha+1, c = alpha` for GPORTs.
#[derive(Clone, Debug)]
struct Family {
    rate: f64,
    offset: f64,
    kernel: Kernel,
    /// GPORT weights `prod_j C(alpha+j-1, j)^{N_j}` need `alpha`.
    alpha: Option<f64>,
}

impl Family {
    fn of(model: &Model) -> Result<Self> {
        model.validate()?;
        match *model {
            Model::Dary { d } => Ok(Family {
                rate: (d - 1) as f64,
                offset: d as f64,
                kernel: Kernel::dary(d)?,
                alpha: None,
            }),
            Model::Gport { alpha } => {
                let a = alpha.to_f64().unwrap();
                Ok(Family { rate: a + 1.0, offset: a, kernel: Kernel::gport(alpha)?, alpha: Some(a) })
            }
            Model::Recursive => Err(Error::Unsupported(
                "limit constants are available for d-ary trees and GPORTs only".into(),
            )),
        }
    }

    /// `prod_{j=1}^{k} (r j + c)`.
    fn denominator(&self, k: usize) -> f64 {
        (1..=k).map(|j| self.rate * j as f64 + self.offset).product()
    }

    /// Coefficient of `E f(T_m)` in the size-indexed `mu` series, and the exact
    /// sum of all coefficients beyond `n`.
    fn size_coefficient(&self, m: usize) -> f64 {
        let (r, c, m) = (self.rate, self.offset, m as f64);
        match self.alpha {
            // d a / ((a m + 1)(a m + d))
            None => c * r / ((r * m + 1.0) * (r * m + c)),
            // alpha b / ((b m - 1)(b m + alpha))
            Some(_) => c * r / ((r * m - 1.0) * (r * m + c)),
        }
    }

    fn size_tail(&self, n: usize) -> f64 {
        let (r, c, n1) = (self.rate, self.offset, (n + 1) as f64);
        match self.alpha {
            None => c / (r * n1 + 1.0),
            Some(_) => c / (r * n1 - 1.0),
        }
    }

    /// `E[number of fringe subtrees of size m in T_n]` for `m < n`.
    fn fringe_count(&self, n: usize, m: usize) -> f64 {
        let (r, nn) = (self.rate, n as f64);
        match self.alpha {
            None => (self.offset * r * nn + self.offset) / (self.offset * r) * self.size_coefficient(m),
            Some(_) => (r * nn - 1.0) / r * self.size_coefficient(m),
        }
    }

    /// Mean correction: `E F(T_n) ~ mu n + mean_offset * mu`.
    fn mean_offset(&self) -> f64 {
        match self.alpha {
            None => 1.0 / self.rate,
            Some(_) => -1.0 / self.rate,
        }
    }
}

/// Weighted per-size sums over all trees of size `k <= K`:
/// `W_k = sum w`, `A_k = sum w f`, `B_k = sum w f^2`, `C_k = sum w f F`.
#[derive(Clone, Debug)]
pub(crate) struct SizeAggregates {
    pub weight: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub trees: Vec<u64>,
}

impl SizeAggregates {
    pub fn collect(model: &Model, toll: &TollSpec, max_size: usize, limits: &EnumerationLimits) -> Result<Self> {
        let n = max_size + 1;
        let mut agg = SizeAggregates {
            weight: vec![0.0; n],
            a: vec![0.0; n],
            b: vec![0.0; n],
            c: vec![0.0; n],
            trees: vec![0; n],
        };
        // generalized binomials C(alpha + j - 1, j)
        let port_coef: Option<Vec<f64>> = model.alpha_f64().map(|a| {
            let mut v = vec![1.0; n];
            for j in 1..n {
                v[j] = v[j - 1] * (a + j as f64 - 1.0) / j as f64;
            }
            v
        });
        let mut ev = Evaluator::new(toll);
        let mut failure = None;
        for_each_tree_upto(model, max_size, limits, |tree| {
            if failure.is_some() {
                return;
            }
            let big_f = match ev.eval(tree) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            let f = ev.contributions()[0];
            let w = match &port_coef {
                Some(coef) => (0..tree.len()).map(|v| coef[tree.out_degree(v)]).product(),
                None => 1.0,
            };
            let k = tree.len();
            agg.weight[k] += w;
            agg.a[k] += w * f;
            agg.b[k] += w * f * f;
            agg.c[k] += w * f * big_f;
            agg.trees[k] += 1;
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(agg),
        }
    }

    pub fn expected_toll(&self, m: usize) -> f64 {
        self.a[m] / self.weight[m]
    }
}

fn factorial(m: usize) -> f64 {
    (2..=m).map(|i| i as f64).product()
}

fn warn_unbounded(model: &Model, toll: &TollSpec, warnings: &mut Vec<String>) {
    if !toll.is_bounded_for(model) {
        warnings.push(format!(
            "toll `{toll}` is unbounded under {model}; the limit theorems assume a bounded toll"
        ));
    }
}

fn tail_bound(family: &Family, model: &Model, toll: &TollSpec, k: usize) -> Option<f64> {
    if toll.meta().support_cutoff.is_some_and(|s| s <= k) {
        return Some(0.0);
    }
    toll.sup_abs(model).map(|s| s * family.size_tail(k))
}

/// `mu_K = r sum_{|T| <= K} w(T) f(T) / prod_{j<=|T|} (r j + c)`.
pub fn mu_enumeration(model: &Model, toll: &TollSpec, k: usize) -> Result<TheoremConstants> {
    mu_enumeration_with(model, toll, k, &EnumerationLimits::default())
}

pub fn mu_enumeration_with(
    model: &Model,
    toll: &TollSpec,
    k: usize,
    limits: &EnumerationLimits,
) -> Result<TheoremConstants> {
    let family = Family::of(model)?;
    if k == 0 {
        return Err(invalid("truncation K must be at least 1"));
    }
    let agg = SizeAggregates::collect(model, toll, k, limits)?;
    Ok(mu_from_aggregates(model, toll, k, &family, &agg))
}

fn mu_from_aggregates(
    model: &Model,
    toll: &TollSpec,
    k: usize,
    family: &Family,
    agg: &SizeAggregates,
) -> TheoremConstants {
    let mu_sequence = mu_partial_sums(family, agg, k);
    let mut warnings = Vec::new();
    warn_unbounded(model, toll, &mut warnings);
    TheoremConstants {
        model: *model,
        toll: toll.to_string(),
        method: Method::Enumeration,
        truncation: Truncation { tree_size_cutoff: Some(k), series_length: None },
        mu: *mu_sequence.last().unwrap(),
        mu_std_error: None,
        mu_sequence,
        sigma2: None,
        sigma2_sequence: Vec::new(),
        variants: Vec::new(),
        tail_bound: tail_bound(family, model, toll, k),
        mean_offset: family.mean_offset(),
        warnings,
    }
}

fn mu_partial_sums(family: &Family, agg: &SizeAggregates, k: usize) -> Vec<f64> {
    let mut acc = 0.0;
    (1..=k)
        .map(|m| {
            acc += family.rate * agg.a[m] / family.denominator(m);
            acc
        })
        .collect()
}

/// `(term1 magnitude, rest)` of the truncated `sigma^2` at cutoff `k`:
/// `sigma^2 = sign * mu^2 / r + rest`.
fn sigma2_parts(family: &Family, agg: &SizeAggregates, ip: &[Vec<f64>], mu: f64, k: usize) -> (f64, f64) {
    let r = family.rate;
    let mut term2 = 0.0;
    for m in 1..=k {
        term2 += (agg.b[m] - 2.0 * agg.c[m] + 2.0 * mu * m as f64 * agg.a[m]) / family.denominator(m);
    }
    term2 *= -r;
    // v_m = r^{-m} A_m / (m-1)!, term3 = c r v^T M v
    let v: Vec<f64> = (1..=k).map(|m| agg.a[m] / (r.powi(m as i32) * factorial(m - 1))).collect();
    let mut term3 = 0.0;
    for i in 0..k {
        if v[i] == 0.0 {
            continue;
        }
        for j in 0..k {
            term3 += v[i] * v[j] * ip[i][j];
        }
    }
    term3 *= family.offset * r;
    (mu * mu / r, term2 + term3)
}

/// Truncated `mu` and `sigma^2` for every cutoff `1..=K`, each `sigma^2_K`
/// using its own `mu_K`. For GPORTs all four combinations of the sign of the
/// `mu^2/(alpha+1)` term and the normalisation of `varphi_k` are reported in
/// `variants`; `sigma2` uses the `+` sign with `varphi_k` divided by `1 - x`,
/// the combination that agrees with the exact variance of small trees.
pub fn sigma2_enumeration(model: &Model, toll: &TollSpec, k: usize) -> Result<TheoremConstants> {
    sigma2_enumeration_with(model, toll, k, &EnumerationLimits::default())
}

pub fn sigma2_enumeration_with(
    model: &Model,
    toll: &TollSpec,
    k: usize,
    limits: &EnumerationLimits,
) -> Result<TheoremConstants> {
    let family = Family::of(model)?;
    if k == 0 {
        return Err(invalid("truncation K must be at least 1"));
    }
    let agg = SizeAggregates::collect(model, toll, k, limits)?;
    let mut out = mu_from_aggregates(model, toll, k, &family, &agg);
    let sequence = |kernel: &Kernel, sign: f64| -> Vec<f64> {
        let ip: Vec<Vec<f64>> = (1..=k).map(|i| (1..=k).map(|j| kernel.inner_product(i, j)).collect()).collect();
        (1..=k)
            .map(|kk| {
                let (t1, rest) = sigma2_parts(&family, &agg, &ip, out.mu_sequence[kk - 1], kk);
                sign * t1 + rest
            })
            .collect()
    };
    out.sigma2_sequence = match *model {
        Model::Gport { alpha } => {
            let normalized = Kernel::gport_normalized(alpha)?;
            for (kernel, which) in [(&family.kernel, GportKernel::Printed), (&normalized, GportKernel::Normalized)] {
                for (sign, conv) in [(1.0, SignConvention::Plus), (-1.0, SignConvention::Minus)] {
                    let seq = sequence(kernel, sign);
                    out.variants.push(Sigma2Variant {
                        sign: conv,
                        kernel: which,
                        sigma2: *seq.last().unwrap(),
                        sigma2_sequence: seq,
                    });
                }
            }
            out.warnings.push(
                "GPORT sigma^2 uses the + sign with varphi divided by (1-x); the kernel without that factor \
                 disagrees with exact variance growth (see variants)"
                    .into(),
            );
            out.variant(SignConvention::Plus, GportKernel::Normalized).unwrap().sigma2_sequence.clone()
        }
        _ => sequence(&family.kernel, -1.0),
    };
    let last = *out.sigma2_sequence.last().unwrap();
    out.sigma2 = Some(last);
    if k >= 2 {
        let step = (last - out.sigma2_sequence[k - 2]).abs();
        if step > CONVERGENCE_TOLERANCE {
            out.warnings.push(format!("sigma^2 truncations have not settled: last step {step:.3e}"));
        }
    }
    if last < 0.0 {
        out.warnings.push(format!("truncated sigma^2 is negative ({last:.6e})"));
    }
    Ok(out)
}

/// GPORT constants; the same computation as [`sigma2_enumeration`].
pub fn gport_constants(alpha: Rational64, toll: &TollSpec, k: usize) -> Result<TheoremConstants> {
    sigma2_enumeration(&Model::gport(alpha)?, toll, k)
}

#[derive(Clone, Debug)]
pub enum FringeMode {
    /// Occurrences of one fixed d-ary tree on the fringe.
    Occurrence(AnyTree),
    /// Fringe subtrees of size `k`.
    Size(usize),
}

/// Closed-form `mu` and `sigma^2` for fringe-subtree counts in d-ary trees.
pub fn fringe_constants(d: usize, mode: &FringeMode) -> Result<TheoremConstants> {
    let model = Model::dary(d)?;
    let family = Family::of(&model)?;
    let (k, multiplicity, toll) = match mode {
        FringeMode::Size(k) => {
            let y = count_dary(d, *k).to_f64().ok_or_else(|| invalid("fringe size too large"))?;
            (*k, y, TollSpec::fringe_size(*k)?)
        }
        FringeMode::Occurrence(s) => {
            if s.arity() != Some(d) {
                return Err(invalid(format!("pattern must be a {d}-ary tree")));
            }
            (s.len(), 1.0, TollSpec::fringe_occurrence(s)?)
        }
    };
    let r = family.rate;
    let mu = r * multiplicity / family.denominator(k);
    let ip = family.kernel.inner_product(k, k);
    let fk = factorial(k - 1);
    let sigma2 = -mu * mu * (2.0 * k as f64 + 1.0 / r)
        + mu
        + family.offset * r.powi(1 - 2 * k as i32) * multiplicity * multiplicity / (fk * fk) * ip;
    Ok(TheoremConstants {
        model,
        toll: toll.to_string(),
        method: Method::ClosedForm,
        truncation: Truncation { tree_size_cutoff: Some(k), series_length: None },
        mu,
        mu_std_error: None,
        mu_sequence: vec![mu],
        sigma2: Some(sigma2),
        sigma2_sequence: vec![sigma2],
        variants: Vec::new(),
        tail_bound: Some(0.0),
        mean_offset: family.mean_offset(),
        warnings: Vec::new(),
    })
}

/// `mu` from the size-indexed series over `E f(T_m)`, `m <= N`, with the tail
/// bounded by `sup|f|` times the remaining coefficient mass. Monte Carlo
/// entries propagate their standard errors into `mu_std_error`.
pub fn mu_size_series(profile: &ExpectedTollProfile, n: usize) -> Result<TheoremConstants> {
    let model = profile.model;
    let family = Family::of(&model)?;
    if n == 0 {
        return Err(invalid("series length N must be at least 1"));
    }
    profile.require(n)?;
    let mut mu = 0.0;
    let mut comp = 0.0;
    let mut var = 0.0;
    let mut any_mc = false;
    let mut mu_sequence = Vec::with_capacity(n);
    for e in &profile.entries[..n] {
        let coef = family.size_coefficient(e.size);
        let term = coef * e.value;
        let t = mu + term;
        comp += if mu.abs() >= term.abs() { (mu - t) + term } else { (term - t) + mu };
        mu = t;
        mu_sequence.push(mu + comp);
        if let Provenance::Mc { std_error, .. } = e.provenance {
            any_mc = true;
            var += (coef * std_error).powi(2);
        }
    }
    let mut warnings = Vec::new();
    if profile.sup_abs.is_none() {
        warnings.push(format!("toll `{}` is unbounded; no tail bound available", profile.toll));
    }
    Ok(TheoremConstants {
        model,
        toll: profile.toll.clone(),
        method: Method::SizeSeries,
        truncation: Truncation { tree_size_cutoff: None, series_length: Some(n) },
        mu: mu + comp,
        mu_std_error: any_mc.then(|| var.sqrt()),
        mu_sequence,
        sigma2: None,
        sigma2_sequence: Vec::new(),
        variants: Vec::new(),
        tail_bound: profile.sup_abs.map(|s| s * family.size_tail(n)),
        mean_offset: family.mean_offset(),
        warnings,
    })
}

/// Sum of the size-series coefficients beyond `N`: the `mu` tail per unit of
/// `sup|f|`.
pub fn size_series_tail(model: &Model, n: usize) -> Result<f64> {
    Ok(Family::of(model)?.size_tail(n))
}

/// Expected number of fringe subtrees of size `m` in a random tree of size `n`.
pub fn expected_fringe_count(model: &Model, n: usize, m: usize) -> Result<f64> {
    let family = Family::of(model)?;
    Ok(match m {
        0 => 0.0,
        _ if m > n => 0.0,
        _ if m == n => 1.0,
        _ => family.fringe_count(n, m),
    })
}

/// Exact `E F(T_n) = sum_{m<n} E[#fringe subtrees of size m] E f(T_m) + E f(T_n)`;
/// for d-ary trees the coefficient is `(d(d-1)n + d) / ((am+1)(am+d))`.
pub fn exact_mean(profile: &ExpectedTollProfile, n: usize) -> Result<f64> {
    let family = Family::of(&profile.model)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    profile.require(n)?;
    if !profile.is_exact_upto(n) {
        return Err(invalid(format!("profile is not exact up to size {n}")));
    }
    let e = &profile.entries;
    let sum: f64 = (1..n).map(|m| family.fringe_count(n, m) * e[m - 1].value).sum();
    Ok(sum + e[n - 1].value)
}
