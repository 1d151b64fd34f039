//! Symmetric pairs `(A, B)`, the block operator `L = [[0, B], [A, 0]]`, its
//! deficiency spaces and the selfadjoint extensions `L_Q`.
//!
//! Complex vectors appear only here and are carried in real form.

mod complex;
mod defect;
mod extension;
mod interval;
mod pair;

pub use complex::{realify, ComplexVector2};
pub use defect::DefectModel;
pub use extension::{
    c_block_relation_check, deficiency_isomorphisms, extension_action, q_condition_check, CBlockReport, CBlocks,
    DeficiencyIsomorphisms, DomainElement, ExtensionAction, QCondition,
};
pub use interval::{gregory_quadrature, interval_defect_model, interval_sweep, refinement_change, IntervalSweep};
pub use pair::{build_l, defect_space, BlockOperator, DefectSpace, SymmetricPair};
