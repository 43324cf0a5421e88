//! The integrals `phi_k` (d-ary trees) and `varphi_k` (GPORTs) and their
//! pairwise inner products over `[0, 1]`.
//!
//! Both expand `w^(k-1)` in powers of `1 - w`, giving
//! `sum_i C(k-1, i) (-1)^i (1-x)^(s+i) / (t+i)`
//! with `s = t = d/(d-1)` shifted appropriately. The coefficients are exact
//! rationals, so inner products are exact rationals as well.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::model::alpha_big;

/// Above this `k` the alternating closed form loses too many digits in `f64`
/// and pointwise values come from quadrature instead.
pub const CLOSED_FORM_MAX_K: usize = 20;

const QUAD_TOL: f64 = 1e-15;

/// Subintervals per integral. On the whole of `[0, 1]` the double exponential
/// rule can stop after a couple of dozen points with a badly optimistic error
/// estimate when `w^(k-1)` is sharply peaked.
const QUAD_PIECES: usize = 8;

fn integrate_pieces(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = (b - a) / QUAD_PIECES as f64;
    (0..QUAD_PIECES)
        .map(|i| {
            let hi = if i + 1 == QUAD_PIECES { b } else { a + (i + 1) as f64 * h };
            quadrature::double_exponential::integrate(&f, a + i as f64 * h, hi, QUAD_TOL).integral
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct Kernel {
    /// Integrand exponent on `1 - w`.
    exponent: BigRational,
    /// Power of `1 - x` on the `i = 0` term.
    shift: BigRational,
    /// Whether the integral is divided by `1 - x` (the d-ary `phi`).
    divided: bool,
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Kernel {
    /// `phi_k(x) = (1-x)^(-1) int_x^1 (1-w)^(d/(d-1)) w^(k-1) dw`.
    pub fn dary(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("arity d must be at least 2, got {d}")));
        }
        let beta = BigRational::new(BigInt::from(d), BigInt::from(d - 1));
        Ok(Kernel { exponent: beta.clone(), shift: beta, divided: true })
    }

    /// `varphi_k(x) = int_x^1 (1-w)^(alpha/(alpha+1)) w^(k-1) dw`.
    pub fn gport(alpha: Rational64) -> Result<Self> {
        if alpha <= Rational64::zero() {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        let a = alpha_big(alpha);
        let gamma = &a / (&a + BigRational::one());
        Ok(Kernel { shift: &gamma + BigRational::one(), exponent: gamma, divided: false })
    }

    /// `(1-x)^(-1) int_x^1 (1-w)^(alpha/(alpha+1)) w^(k-1) dw`: the GPORT
    /// integral with the same normalisation as the d-ary `phi`.
    pub fn gport_normalized(alpha: Rational64) -> Result<Self> {
        let printed = Self::gport(alpha)?;
        Ok(Kernel { shift: printed.exponent.clone(), exponent: printed.exponent, divided: true })
    }

    /// Exact coefficients `c_i` of `(1-x)^(shift+i)`, `i = 0..k`.
    pub fn coefficients(&self, k: usize) -> Vec<BigRational> {
        assert!(k >= 1);
        let denom0 = &self.exponent + BigRational::one();
        (0..k)
            .map(|i| {
                let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                BigRational::from_integer(sign * binomial(k - 1, i)) / (&denom0 + BigRational::from_integer(i.into()))
            })
            .collect()
    }

    fn check(k: usize, x: f64) -> Result<()> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if !(0.0..1.0).contains(&x) {
            return Err(invalid(format!("x must lie in [0, 1), got {x}")));
        }
        Ok(())
    }

    /// Closed-form value, summed with compensation.
    pub fn eval_closed_form(&self, k: usize, x: f64) -> Result<f64> {
        Self::check(k, x)?;
        let y = 1.0 - x;
        let s = to_f64(&self.shift);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (i, c) in self.coefficients(k).iter().enumerate() {
            let term = to_f64(c) * y.powf(s + i as f64);
            let t = sum + term;
            comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
            sum = t;
        }
        Ok(sum + comp)
    }

    /// The defining integral by adaptive quadrature.
    pub fn eval_quadrature(&self, k: usize, x: f64) -> Result<f64> {
        Self::check(k, x)?;
        Ok(self.quad(k, x))
    }

    fn quad(&self, k: usize, x: f64) -> f64 {
        let e = to_f64(&self.exponent);
        let p = (k - 1) as i32;
        let r = integrate_pieces(|w| (1.0 - w).powf(e) * w.powi(p), x, 1.0);
        if self.divided {
            r / (1.0 - x)
        } else {
            r
        }
    }

    /// Pointwise value: closed form for `k <= 20`, quadrature beyond.
    pub fn eval(&self, k: usize, x: f64) -> Result<f64> {
        if k <= CLOSED_FORM_MAX_K {
            self.eval_closed_form(k, x)
        } else {
            self.eval_quadrature(k, x)
        }
    }

    /// `int_0^1 K_{k1} K_{k2}` as an exact rational.
    pub fn inner_product_exact(&self, k1: usize, k2: usize) -> BigRational {
        let a = self.coefficients(k1);
        let b = self.coefficients(k2);
        let base = &self.shift + &self.shift + BigRational::one();
        let mut total = BigRational::zero();
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                total += ai * bj / (&base + BigRational::from_integer((i + j).into()));
            }
        }
        total
    }

    pub fn inner_product(&self, k1: usize, k2: usize) -> f64 {
        to_f64(&self.inner_product_exact(k1, k2))
    }

    /// The inner product by nested quadrature, independent of the closed form.
    pub fn inner_product_quadrature(&self, k1: usize, k2: usize) -> f64 {
        integrate_pieces(|x| if x >= 1.0 { 0.0 } else { self.quad(k1, x) * self.quad(k2, x) }, 0.0, 1.0)
    }
}

/// `phi_k(x)` for d-ary trees.
pub fn phi(d: usize, k: usize, x: f64) -> Result<f64> {
    Kernel::dary(d)?.eval(k, x)
}

pub fn phi_inner_product(d: usize, k1: usize, k2: usize) -> Result<f64> {
    Ok(Kernel::dary(d)?.inner_product(k1.max(1), k2.max(1)))
}

/// `varphi_k(x)` for GPORTs with parameter `alpha`; defined on `[0, 1]`.
pub fn varphi(alpha: Rational64, k: usize, x: f64) -> Result<f64> {
    if x == 1.0 && k >= 1 {
        Kernel::gport(alpha)?;
        return Ok(0.0);
    }
    Kernel::gport(alpha)?.eval(k, x)
}

/// `varphi_k(x) / (1 - x)`, the normalisation under which the GPORT variance
/// formula matches exact variances.
pub fn varphi_normalized(alpha: Rational64, k: usize, x: f64) -> Result<f64> {
    Kernel::gport_normalized(alpha)?.eval(k, x)
}

pub fn varphi_inner_product(alpha: Rational64, k1: usize, k2: usize) -> Result<f64> {
    Ok(Kernel::gport(alpha)?.inner_product(k1.max(1), k2.max(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn binary_examples() {
        let k = Kernel::dary(2).unwrap();
        for x in [0.0, 0.2, 0.7, 0.99] {
            let expected = (1.0 - x) * (1.0 - x) / 3.0;
            assert!((k.eval(1, x).unwrap() - expected).abs() < 1e-15);
        }
        assert!((k.eval(2, 0.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(k.inner_product_exact(1, 1), q(1, 45));
        assert!(k.eval(3, 1.0 - 1e-12).unwrap().abs() < 1e-20);
        assert!(k.eval(1, 1.0).is_err());
        assert!(k.eval(0, 0.5).is_err());
    }

    #[test]
    fn port_leaf_kernel() {
        // varphi_1 = (2/3)(1-x)^(3/2), so the inner product is (4/9)/4
        let k = Kernel::gport(Rational64::from_integer(1)).unwrap();
        assert_eq!(k.inner_product_exact(1, 1), q(1, 9));
        assert!((k.eval(1, 0.19).unwrap() - 2.0 / 3.0 * 0.81f64.powf(1.5)).abs() < 1e-15);
        assert_eq!(varphi(Rational64::from_integer(1), 4, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn normalized_port_kernel() {
        // (2/3)(1-x)^(1/2), inner product (4/9)(1/2)
        let k = Kernel::gport_normalized(Rational64::from_integer(1)).unwrap();
        assert_eq!(k.inner_product_exact(1, 1), q(2, 9));
        assert!((k.eval(2, 0.4).unwrap() - k.eval_quadrature(2, 0.4).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn symmetric_inner_products() {
        let k = Kernel::dary(3).unwrap();
        assert_eq!(k.inner_product_exact(2, 5), k.inner_product_exact(5, 2));
    }

    #[test]
    fn routes_agree_on_samples() {
        for d in [2, 3] {
            let k = Kernel::dary(d).unwrap();
            for kk in [1, 2, 7, 15] {
                for x in [0.0, 0.3, 0.9] {
                    let a = k.eval_closed_form(kk, x).unwrap();
                    let b = k.eval_quadrature(kk, x).unwrap();
                    assert!((a - b).abs() < 1e-12, "d={d} k={kk} x={x}: {a} vs {b}");
                }
            }
            let ip = k.inner_product(1, 2);
            assert!((ip - k.inner_product_quadrature(1, 2)).abs() < 1e-12);
        }
    }
}
