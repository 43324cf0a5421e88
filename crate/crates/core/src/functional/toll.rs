//! Toll functions: the built-in catalog, user closures and their metadata.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};
use crate::model::Model;
use crate::tree::{canonical_form, AnyTree, CanonicalForm, Equivalence, IncreasingTree};

use super::index::{Fringe, Needs};

/// Declared properties of a toll function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TollMeta {
    /// `|f| <= sup_abs` on every tree of every model.
    pub bounded: bool,
    pub sup_abs: Option<f64>,
    /// `f(T)` depends on `|T|` only.
    pub size_only: bool,
    /// `f(T) = 0` whenever `|T|` exceeds this.
    pub support_cutoff: Option<usize>,
    /// Every value of `f` (hence of `F`) is an integer multiple of this spacing.
    pub lattice: Option<f64>,
}

impl TollMeta {
    pub const fn unbounded() -> Self {
        TollMeta { bounded: false, sup_abs: None, size_only: false, support_cutoff: None, lattice: None }
    }

    const fn indicator() -> Self {
        TollMeta { bounded: true, sup_abs: Some(1.0), size_only: false, support_cutoff: None, lattice: Some(1.0) }
    }
}

type CustomFn = dyn Fn(&Fringe<'_>) -> std::result::Result<f64, String> + Send + Sync;

/// A user-supplied toll closure.
#[derive(Clone)]
pub struct CustomToll {
    eval: Arc<CustomFn>,
    needs: Needs,
}

impl fmt::Debug for CustomToll {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomToll").field("needs", &self.needs).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum TollKind {
    /// 1 on single vertices.
    Leaf,
    /// 1 when the root has out-degree `k`.
    OutDegree(usize),
    /// `|T| - 1`; `F` is the internal path length.
    PathLength,
    /// `ln |T|`; `F` is the log-product of subtree sizes.
    ShapeLog,
    /// 1 when `|T| = k`.
    FringeSize(usize),
    /// 1 when `T` equals the pattern under the labelled equivalence.
    FringeOccurrence { pattern: CanonicalForm, size: usize, arity: Option<usize> },
    /// `ln(1 + 1/s(T))`, `s` the number of subtrees containing the root.
    LogRootSubtrees,
    /// `ln R(T)`, `R` the order of the symmetry group of the root branches.
    LogBranchSymmetry(Equivalence),
    /// Toll whose functional is the number of vertex orbits.
    Orbits(Equivalence),
    Constant(f64),
    Custom(CustomToll),
}

/// A named toll with parameters and metadata.
#[derive(Clone, Debug)]
pub struct TollSpec {
    name: String,
    params: Map<String, Value>,
    kind: TollKind,
    meta: TollMeta,
}

/// Registered built-in tolls: `(name, parameters, description)`.
pub const REGISTRY: &[(&str, &str, &str)] = &[
    ("leaf", "", "1 on single-vertex trees (F = number of leaves)"),
    ("outdegree", "k=INT", "1 when the root has out-degree k"),
    ("path-length", "", "|T| - 1 (F = internal path length; unbounded)"),
    ("shape", "", "ln |T| (F = log-product of subtree sizes; unbounded)"),
    ("fringe-size", "k=INT", "1 when |T| = k (F = number of fringe subtrees of size k)"),
    ("fringe-occurrence", "tree=TREE", "1 when T equals TREE, including slots/order and relative label order"),
    ("log-subtrees", "", "ln(1 + 1/s(T)) with s(T) the number of subtrees containing the root"),
    ("log-branch-symmetry", "equivalence=shape|labeled", "ln R(T), R(T) = prod of (multiplicity)! over isomorphism classes of root branches"),
    ("orbits", "equivalence=shape|labeled", "toll whose functional is the number of vertex orbits under automorphisms (unbounded)"),
    ("constant", "c=REAL", "the constant c (F = c |T|)"),
    ("zero", "", "the zero toll"),
];

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}

impl TollSpec {
    fn new(name: &str, params: Map<String, Value>, kind: TollKind, meta: TollMeta) -> Self {
        TollSpec { name: name.to_string(), params, kind, meta }
    }

    pub fn leaf() -> Self {
        let meta = TollMeta { size_only: true, support_cutoff: Some(1), ..TollMeta::indicator() };
        Self::new("leaf", Map::new(), TollKind::Leaf, meta)
    }

    pub fn outdegree(k: usize) -> Self {
        let mut p = Map::new();
        p.insert("k".into(), k.into());
        Self::new("outdegree", p, TollKind::OutDegree(k), TollMeta::indicator())
    }

    pub fn path_length() -> Self {
        let meta = TollMeta { size_only: true, lattice: Some(1.0), ..TollMeta::unbounded() };
        Self::new("path-length", Map::new(), TollKind::PathLength, meta)
    }

    pub fn shape() -> Self {
        let meta = TollMeta { size_only: true, ..TollMeta::unbounded() };
        Self::new("shape", Map::new(), TollKind::ShapeLog, meta)
    }

    pub fn fringe_size(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("fringe-size needs k >= 1"));
        }
        let mut p = Map::new();
        p.insert("k".into(), k.into());
        let meta = TollMeta { size_only: true, support_cutoff: Some(k), ..TollMeta::indicator() };
        Ok(Self::new("fringe-size", p, TollKind::FringeSize(k), meta))
    }

    pub fn fringe_occurrence(pattern: &AnyTree) -> Result<Self> {
        pattern.validate()?;
        let mut p = Map::new();
        p.insert("tree".into(), pattern.to_string().into());
        let size = pattern.len();
        let meta = TollMeta { size_only: size == 1, support_cutoff: Some(size), ..TollMeta::indicator() };
        let kind = TollKind::FringeOccurrence {
            pattern: canonical_form(pattern, Equivalence::Labeled),
            size,
            arity: pattern.arity(),
        };
        Ok(Self::new("fringe-occurrence", p, kind, meta))
    }

    pub fn log_root_subtrees() -> Self {
        let meta = TollMeta { bounded: true, sup_abs: Some(std::f64::consts::LN_2), ..TollMeta::unbounded() };
        Self::new("log-subtrees", Map::new(), TollKind::LogRootSubtrees, meta)
    }

    pub fn log_branch_symmetry(eq: Equivalence) -> Self {
        let mut p = Map::new();
        p.insert("equivalence".into(), serde_json::to_value(eq).unwrap());
        Self::new("log-branch-symmetry", p, TollKind::LogBranchSymmetry(eq), TollMeta::unbounded())
    }

    pub fn orbits(eq: Equivalence) -> Self {
        let mut p = Map::new();
        p.insert("equivalence".into(), serde_json::to_value(eq).unwrap());
        let meta = TollMeta { lattice: Some(1.0), ..TollMeta::unbounded() };
        Self::new("orbits", p, TollKind::Orbits(eq), meta)
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(invalid("constant toll must be finite"));
        }
        let mut p = Map::new();
        p.insert("c".into(), c.into());
        let meta = TollMeta {
            bounded: true,
            sup_abs: Some(c.abs()),
            size_only: true,
            support_cutoff: (c == 0.0).then_some(0),
            lattice: (c != 0.0).then_some(c.abs()),
        };
        Ok(Self::new("constant", p, TollKind::Constant(c), meta))
    }

    pub fn zero() -> Self {
        Self::constant(0.0).unwrap()
    }

    /// A toll backed by a closure. The closure must depend only on the
    /// relative order of labels; `relabel_invariance_audit` checks this.
    pub fn custom<F>(name: &str, meta: TollMeta, needs: Needs, eval: F) -> Self
    where
        F: Fn(&Fringe<'_>) -> std::result::Result<f64, String> + Send + Sync + 'static,
    {
        Self::new(name, Map::new(), TollKind::Custom(CustomToll { eval: Arc::new(eval), needs }), meta)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &Map<String, Value> {
        &self.params
    }

    pub fn kind(&self) -> &TollKind {
        &self.kind
    }

    pub fn meta(&self) -> TollMeta {
        self.meta
    }

    /// Supremum of `|f|` over trees of `model`, if finite.
    pub fn sup_abs(&self, model: &Model) -> Option<f64> {
        match (&self.kind, model) {
            (TollKind::LogBranchSymmetry(_), Model::Dary { d }) => Some(ln_factorial(*d)),
            _ => self.meta.sup_abs,
        }
    }

    /// Whether condition (bounded toll) holds for `model`.
    pub fn is_bounded_for(&self, model: &Model) -> bool {
        self.sup_abs(model).is_some()
    }

    /// Lattice spacing of `F` under `model`, if any.
    pub fn lattice(&self, model: &Model) -> Option<f64> {
        match (&self.kind, model) {
            (TollKind::LogBranchSymmetry(_), Model::Dary { d: 2 }) => Some(std::f64::consts::LN_2),
            _ => self.meta.lattice,
        }
    }

    pub fn needs(&self) -> Needs {
        match &self.kind {
            TollKind::LogRootSubtrees => Needs { subtree_counts: true, ..Needs::default() },
            TollKind::LogBranchSymmetry(Equivalence::Shape) => Needs { shape_classes: true, ..Needs::default() },
            TollKind::LogBranchSymmetry(Equivalence::Labeled) => Needs { labeled_classes: true, ..Needs::default() },
            TollKind::Orbits(eq) => Needs { orbits: Some(*eq), ..Needs::default() },
            TollKind::Custom(c) => c.needs,
            _ => Needs::default(),
        }
    }

    /// Evaluates `f` on one fringe subtree.
    pub fn eval(&self, s: &Fringe<'_>) -> std::result::Result<f64, String> {
        let indicator = |b: bool| if b { 1.0 } else { 0.0 };
        Ok(match &self.kind {
            TollKind::Leaf => indicator(s.size() == 1),
            TollKind::OutDegree(k) => indicator(s.out_degree() == *k),
            TollKind::PathLength => (s.size() - 1) as f64,
            TollKind::ShapeLog => (s.size() as f64).ln(),
            TollKind::FringeSize(k) => indicator(s.size() == *k),
            TollKind::FringeOccurrence { pattern, size, arity } => {
                indicator(s.size() == *size && s.index().arity() == *arity && s.labeled_form() == *pattern)
            }
            TollKind::LogRootSubtrees => match s.subtree_count() {
                Some(count) => (1.0 / count as f64).ln_1p(),
                None => (-s.log_subtree_count()).exp().ln_1p(),
            },
            TollKind::LogBranchSymmetry(eq) => {
                let mut classes: SmallVec<[u32; 8]> = s.branches().map(|b| b.class(*eq)).collect();
                classes.sort_unstable();
                classes.chunk_by(|a, b| a == b).map(|run| ln_factorial(run.len())).sum()
            }
            TollKind::Orbits(_) => {
                s.orbit_count() as f64 - s.branches().map(|b| b.orbit_count() as f64).sum::<f64>()
            }
            TollKind::Constant(c) => *c,
            TollKind::Custom(c) => (c.eval)(s)?,
        })
    }

    /// Builds a registered toll from its name and JSON parameters.
    pub fn builtin(name: &str, params: &Value) -> Result<Self> {
        let canonical = name.trim().to_ascii_lowercase().replace('_', "-");
        let empty = Map::new();
        let obj = match params {
            Value::Null => &empty,
            Value::Object(m) => m,
            _ => return Err(invalid(format!("parameters for `{name}` must be a JSON object"))),
        };
        let allowed: &[&str] = match canonical.as_str() {
            "outdegree" | "fringe-size" => &["k"],
            "fringe-occurrence" => &["tree"],
            "log-branch-symmetry" | "orbits" => &["equivalence"],
            "constant" => &["c"],
            _ => &[],
        };
        if let Some(extra) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(invalid(format!("toll `{canonical}` has no parameter `{extra}`")));
        }
        let uint = |key: &str| -> Result<usize> {
            obj.get(key)
                .ok_or_else(|| invalid(format!("toll `{canonical}` needs parameter `{key}`")))?
                .as_u64()
                .map(|k| k as usize)
                .ok_or_else(|| invalid(format!("parameter `{key}` must be a non-negative integer")))
        };
        let equivalence = || -> Result<Equivalence> {
            match obj.get("equivalence") {
                None => Ok(Equivalence::Shape),
                Some(v) => serde_json::from_value(v.clone())
                    .map_err(|_| invalid("equivalence must be `shape` or `labeled`")),
            }
        };
        match canonical.as_str() {
            "leaf" => Ok(Self::leaf()),
            "outdegree" => Ok(Self::outdegree(uint("k")?)),
            "path-length" => Ok(Self::path_length()),
            "shape" => Ok(Self::shape()),
            "fringe-size" => Self::fringe_size(uint("k")?),
            "fringe-occurrence" => {
                let text = obj
                    .get("tree")
                    .and_then(Value::as_str)
                    .ok_or_else(|| invalid("fringe-occurrence needs a `tree` string"))?;
                Self::fringe_occurrence(&AnyTree::parse(text)?)
            }
            "log-subtrees" | "log-root-subtrees" => Ok(Self::log_root_subtrees()),
            "log-branch-symmetry" => Ok(Self::log_branch_symmetry(equivalence()?)),
            "orbits" => Ok(Self::orbits(equivalence()?)),
            "constant" => Self::constant(
                obj.get("c")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| invalid("constant needs a numeric `c`"))?,
            ),
            "zero" => Ok(Self::zero()),
            _ => Err(Error::UnknownToll(name.to_string())),
        }
    }
}

/// Splits `a=1,b=[x, y]` at top-level commas.
fn split_params(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl FromStr for TollSpec {
    type Err = Error;

    /// Compact syntax: `name` or `name:key=value,key=value`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        let mut params = Map::new();
        for pair in rest.map(split_params).unwrap_or_default() {
            if pair.trim().is_empty() {
                continue;
            }
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, found `{pair}`")))?;
            let v = v.trim();
            let value = if let Ok(i) = v.parse::<u64>() {
                Value::from(i)
            } else if let Ok(x) = v.parse::<f64>() {
                Value::from(x)
            } else {
                Value::from(v)
            };
            params.insert(k.trim().to_string(), value);
        }
        TollSpec::builtin(name, &Value::Object(params))
    }
}

impl fmt::Display for TollSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            let sep = if i == 0 { ':' } else { ',' };
            match v {
                Value::String(s) => write!(f, "{sep}{k}={s}")?,
                other => write!(f, "{sep}{k}={other}")?,
            }
        }
        Ok(())
    }
}
