//! Brute-force audits of toll functions over all small trees of a model.

use serde::Serialize;

use crate::error::Result;
use crate::model::Model;
use crate::tree::{for_each_tree_upto, AnyTree, EnumerationLimits, IncreasingTree};

use super::engine::{evaluate_additive, toll_at_root};
use super::toll::TollSpec;

const LABEL_SHIFT: u32 = 10;

#[derive(Clone, Debug, Serialize)]
pub struct AuditWitness {
    pub tree: String,
    pub expected: f64,
    pub observed: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub toll: String,
    pub model: Model,
    pub size_cutoff: usize,
    pub trees_checked: usize,
    pub passed: bool,
    /// First few failures.
    pub witnesses: Vec<AuditWitness>,
}

impl AuditReport {
    fn new(toll: &TollSpec, model: &Model, size_cutoff: usize) -> Self {
        AuditReport {
            toll: toll.to_string(),
            model: *model,
            size_cutoff,
            trees_checked: 0,
            passed: true,
            witnesses: Vec::new(),
        }
    }

    fn fail(&mut self, tree: &AnyTree, expected: f64, observed: f64, reason: impl Into<String>) {
        self.passed = false;
        if self.witnesses.len() < 8 {
            self.witnesses.push(AuditWitness { tree: tree.to_string(), expected, observed, reason: reason.into() });
        }
    }
}

/// Evaluates the toll and the functional on every tree up to `size_cutoff`
/// and on a copy whose labels are shifted by 10; any difference is reported.
pub fn relabel_invariance_audit(toll: &TollSpec, model: &Model, size_cutoff: usize) -> Result<AuditReport> {
    let mut report = AuditReport::new(toll, model, size_cutoff);
    let mut first_error = None;
    for_each_tree_upto(model, size_cutoff, &EnumerationLimits::default(), |tree| {
        report.trees_checked += 1;
        let shifted = tree.shifted_labels(LABEL_SHIFT);
        let run = || -> Result<[f64; 4]> {
            Ok([
                toll_at_root(toll, tree)?,
                toll_at_root(toll, &shifted)?,
                evaluate_additive(toll, tree)?.value,
                evaluate_additive(toll, &shifted)?.value,
            ])
        };
        match run() {
            Ok([f, fs, big_f, big_fs]) => {
                if f != fs {
                    report.fail(tree, f, fs, "toll changed under a label shift");
                } else if big_f != big_fs {
                    report.fail(tree, big_f, big_fs, "functional changed under a label shift");
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    })?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

/// Checks the declared metadata (bound, size dependence, support cutoff,
/// lattice) against the evaluator on every tree up to `size_cutoff`.
pub fn metadata_audit(toll: &TollSpec, model: &Model, size_cutoff: usize) -> Result<AuditReport> {
    let mut report = AuditReport::new(toll, model, size_cutoff);
    let meta = toll.meta();
    let sup = toll.sup_abs(model);
    let mut by_size: Vec<Option<f64>> = vec![None; size_cutoff + 1];
    let mut first_error = None;
    for_each_tree_upto(model, size_cutoff, &EnumerationLimits::default(), |tree| {
        report.trees_checked += 1;
        let f = match toll_at_root(toll, tree) {
            Ok(f) => f,
            Err(e) => {
                first_error.get_or_insert(e);
                return;
            }
        };
        if let Some(s) = sup {
            if f.abs() > s * (1.0 + 1e-12) {
                report.fail(tree, s, f, "exceeds the declared bound");
            }
        }
        if meta.support_cutoff.is_some_and(|k| tree.len() > k) && f != 0.0 {
            report.fail(tree, 0.0, f, "non-zero beyond the support cutoff");
        }
        if let Some(h) = meta.lattice.filter(|_| toll.lattice(model).is_some()).or(toll.lattice(model)) {
            let r = f / h;
            if (r - r.round()).abs() > 1e-9 {
                report.fail(tree, r.round() * h, f, "off the declared lattice");
            }
        }
        if meta.size_only {
            match by_size[tree.len()] {
                None => by_size[tree.len()] = Some(f),
                Some(prev) if prev != f => report.fail(tree, prev, f, "depends on more than the size"),
                Some(_) => {}
            }
        }
    })?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::index::{Fringe, Needs};
    use crate::functional::toll::TollMeta;

    #[test]
    fn builtins_pass() {
        let m = Model::Dary { d: 2 };
        assert!(relabel_invariance_audit(&TollSpec::leaf(), &m, 5).unwrap().passed);
        assert!(relabel_invariance_audit(&TollSpec::shape(), &m, 5).unwrap().passed);
        assert!(metadata_audit(&TollSpec::leaf(), &m, 5).unwrap().passed);
    }

    #[test]
    fn absolute_label_toll_is_caught() {
        let bad = TollSpec::custom("root-label", TollMeta::unbounded(), Needs::default(), |s: &Fringe<'_>| {
            Ok(s.root_label() as f64)
        });
        let report = relabel_invariance_audit(&bad, &Model::Dary { d: 2 }, 3).unwrap();
        assert!(!report.passed);
        assert_eq!(report.witnesses[0].tree, "1[0:_, 1:_]");
    }

    #[test]
    fn wrong_metadata_is_caught() {
        let liar = TollSpec::custom(
            "liar",
            TollMeta { size_only: true, ..TollMeta::unbounded() },
            Needs::default(),
            |s: &Fringe<'_>| Ok(s.out_degree() as f64),
        );
        assert!(!metadata_audit(&liar, &Model::Dary { d: 2 }, 3).unwrap().passed);
    }
}
