//! Limit constants `mu`, `sigma^2` of the central limit theorems, the exact
//! finite-size mean, and the integrals they need.

mod kernel;
mod profile;
mod series;

use serde::{Deserialize, Serialize};

use crate::model::Model;

pub use kernel::{phi, phi_inner_product, varphi, varphi_inner_product, varphi_normalized, Kernel, CLOSED_FORM_MAX_K};
pub use profile::{ExpectedTollProfile, ProfileEntry, Provenance};
pub use series::{
    default_cutoff, exact_mean, expected_fringe_count, fringe_constants, gport_constants, mu_enumeration,
    mu_enumeration_with, mu_size_series, sigma2_enumeration, sigma2_enumeration_with, size_series_tail,
    FringeMode, CONVERGENCE_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Enumeration,
    SizeSeries,
    ClosedForm,
}

/// Normalisation of the GPORT integral `varphi_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GportKernel {
    /// `int_x^1 (1-w)^(alpha/(alpha+1)) w^(k-1) dw`.
    Printed,
    /// The same integral divided by `1 - x`, like the d-ary `phi_k`.
    Normalized,
}

/// One GPORT `sigma^2` evaluation: a sign of the `mu^2/(alpha+1)` term and a
/// kernel normalisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sigma2Variant {
    pub sign: SignConvention,
    pub kernel: GportKernel,
    pub sigma2: f64,
    pub sigma2_sequence: Vec<f64>,
}

/// Sign in front of the `mu^2/(alpha+1)` term of the GPORT variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Largest tree size `K` in the tree sums.
    pub tree_size_cutoff: Option<usize>,
    /// Number of terms `N` of the size-indexed series.
    pub series_length: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub model: Model,
    pub toll: String,
    pub method: Method,
    pub truncation: Truncation,
    pub mu: f64,
    pub mu_std_error: Option<f64>,
    /// `mu` truncated at `1, 2, ..`.
    pub mu_sequence: Vec<f64>,
    pub sigma2: Option<f64>,
    pub sigma2_sequence: Vec<f64>,
    /// GPORT only: `sigma^2` under every sign and kernel normalisation.
    pub variants: Vec<Sigma2Variant>,
    /// Bound on `|mu - mu_truncated|` when the toll is bounded.
    pub tail_bound: Option<f64>,
    /// `c` in `E F(T_n) = mu n + c mu + o(1)`.
    pub mean_offset: f64,
    pub warnings: Vec<String>,
}

impl TheoremConstants {
    /// Leading-order mean `mu n + c mu`.
    pub fn predicted_mean(&self, n: usize) -> f64 {
        self.mu * n as f64 + self.mean_offset * self.mu
    }

    pub fn predicted_variance(&self, n: usize) -> Option<f64> {
        self.sigma2.map(|s| s * n as f64)
    }

    /// GPORT `sigma^2` under the given sign and kernel.
    pub fn variant(&self, sign: SignConvention, kernel: GportKernel) -> Option<&Sigma2Variant> {
        self.variants.iter().find(|v| v.sign == sign && v.kernel == kernel)
    }
}
