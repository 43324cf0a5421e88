//! Toll functions and additive tree functionals.

mod audit;
mod catalog;
mod engine;
mod index;
mod toll;

pub use audit::{metadata_audit, relabel_invariance_audit, AuditReport, AuditWitness};
pub use catalog::{
    automorphism_group_order, branch_symmetry, log_subtree_toll, orbit_count, orbit_toll,
    subtree_count_root,
};
pub use engine::{
    evaluate_additive, evaluate_additive_with, fringe_sum, toll_at_root, Evaluator, FunctionalValue,
};
pub use index::{Fringe, FringeIndex, Needs};
pub use toll::{TollKind, TollMeta, TollSpec, REGISTRY};

/// Materialized fringe subtrees of `tree`, one per vertex in label order,
/// each relabelled `1..=size`.
pub fn fringe_subtrees<T: crate::tree::IncreasingTree>(tree: &T) -> Vec<crate::tree::AnyTree> {
    let index = FringeIndex::build(tree, Needs::default());
    index.fringes().map(|f| f.materialize()).collect()
}
