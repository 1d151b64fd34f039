//! The duality operator of two Hilbert spaces sharing a dense subspace,
//! its spectral measures, and extensions of semibounded operators.

mod extension;
mod measure;
mod operator;

pub use extension::{
    essential_selfadjointness_probe, form_correspondence, form_of_operator, friedrichs_extension,
    friedrichs_reproduction_residual, krein_membership, operator_of_form, FriedrichsExtension, KreinReport,
    PartialOperator, RangeDensity, SemiboundedForm,
};
pub use measure::{discrete_common_domain, radon_nikodym, spectral_measure, DiscreteMeasureSpace, SpectralMeasure};
pub use operator::{
    duality_operator, inclusion_graph, ker_j_star, kernel_complement_residual, partial_isometry_k,
    quadratic_form_residual, reflection_hat, PartialIsometry, Reflection,
};
