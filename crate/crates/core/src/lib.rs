//! Random increasing trees and additive tree functionals.
//!
//! The crate covers three families of increasing trees (d-ary, recursive and
//! generalised plane-oriented), additive functionals `F(T) = sum_j F(B_j) + f(T)`
//! driven by a toll function `f`, the limit constants `mu` and `sigma^2` of
//! their central limit theorems, a Monte Carlo engine, and brute-force oracles.

pub mod constants;
pub mod error;
pub mod functional;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod tree;

pub use error::{Error, Result};
pub use functional::{evaluate_additive, TollSpec};
pub use model::Model;
