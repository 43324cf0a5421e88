//! Growth models: d-ary increasing trees, recursive trees and GPORTs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A random increasing tree model.
///
/// `PORT` is `Gport` with `alpha = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Model {
    /// Uniform d-ary increasing trees, `d >= 2`.
    Dary { d: usize },
    /// Uniform recursive trees, children ordered by label.
    Recursive,
    /// Generalised plane-oriented recursive trees with parameter `alpha > 0`.
    Gport { alpha: Rational64 },
}

impl Model {
    pub fn dary(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("arity d must be at least 2, got {d}")));
        }
        if d > u32::MAX as usize {
            return Err(invalid("arity too large"));
        }
        Ok(Model::Dary { d })
    }

    pub fn gport(alpha: Rational64) -> Result<Self> {
        if alpha <= Rational64::zero() {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Model::Gport { alpha })
    }

    pub fn port() -> Self {
        Model::Gport {
            alpha: Rational64::from_integer(1),
        }
    }

    /// Re-checks the parameter invariants (useful after deserialization of raw values).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::Dary { d } => Model::dary(d).map(|_| ()),
            Model::Gport { alpha } => Model::gport(alpha).map(|_| ()),
            Model::Recursive => Ok(()),
        }
    }

    pub fn is_dary(&self) -> bool {
        matches!(self, Model::Dary { .. })
    }

    pub fn alpha_f64(&self) -> Option<f64> {
        match self {
            Model::Gport { alpha } => alpha.to_f64(),
            _ => None,
        }
    }
}

pub fn alpha_big(alpha: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*alpha.numer()), BigInt::from(*alpha.denom()))
}

/// Parses `2`, `1/2` or a terminating decimal such as `0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || invalid(format!("cannot parse `{s}` as a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let denom = 10i64.pow(frac.len() as u32);
        let frac_part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let magnitude = int_part.abs() * denom + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational64::new(numer, denom));
    }
    s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad())
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Dary { d } => write!(f, "dary:{d}"),
            Model::Recursive => write!(f, "recursive"),
            Model::Gport { alpha } => write!(f, "gport:{alpha}"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    /// Accepts `dary:D`, `binary`, `recursive`, `port` and `gport:ALPHA`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let param = |key: &str| {
            param
                .map(|p| p.strip_prefix(key).and_then(|p| p.strip_prefix('=')).unwrap_or(p))
                .ok_or_else(|| invalid(format!("model `{name}` needs a parameter, e.g. `{name}:2`")))
        };
        match name.to_ascii_lowercase().as_str() {
            "dary" | "d-ary" => {
                let d = param("d")?;
                let d: usize = d.parse().map_err(|_| invalid(format!("bad arity `{d}`")))?;
                Model::dary(d)
            }
            "binary" => Ok(Model::Dary { d: 2 }),
            "recursive" => Ok(Model::Recursive),
            "port" => Ok(Model::port()),
            "gport" => Model::gport(parse_rational(param("alpha")?)?),
            other => Err(invalid(format!(
                "unknown model `{other}` (expected dary:D, binary, recursive, port, gport:ALPHA)"
            ))),
        }
    }
}

impl From<Model> for String {
    fn from(m: Model) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Model {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
