//! Resistor networks: the graph Laplacian in `l²` and in the energy space,
//! dipoles, the K/L symmetric pair and exhaustions by finite subnetworks.

mod energy;
mod exhaustion;
mod graph;
mod kl;

pub use energy::{
    delta_identity_check, dipole, effective_resistance, reproducing_residual, sqrt2_bound_check, sqrt2_ratio,
    EnergySpace, Sqrt2Report, DENSE_LIMIT,
};
pub use exhaustion::{
    exhaustion_harmonics, wire, BoundaryMode, ExhaustionFamily, ExhaustionLevel, FamilyKind, LevelGap, WIRED_VERTEX,
};
pub use graph::{binary_tree, energy_inner, laplacian_apply, lattice2d, path, star, Network};
pub use kl::{
    big_l_selfadjointness_probe, kl_pair, network_duality, norm_comparability_probe, selfadjoint_products, BigLProbe,
    KlPair, MomentCheck, NetworkDuality, NormComparability, SelfadjointProducts,
};
