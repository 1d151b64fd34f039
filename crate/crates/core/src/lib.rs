//! Finite-dimensional models of unbounded-operator constructions:
//! characteristic projections of operator graphs, the duality operator of
//! two Hilbert spaces sharing a dense subspace, defect spaces of symmetric
//! pairs, Friedrichs and Krein extensions, and graph Laplacians on resistor
//! networks.
//!
//! Everything is generic over the scalar type through [`Real`]; the
//! aliases at the crate root fix it to `f64`.

// `!(x <= tol)` is used on purpose so that NaN residuals fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charproj;
pub mod duality;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod network;
pub mod random;
pub mod report;
mod scalar;
pub mod sympair;
pub mod verify;

pub use error::{Error, Result};
pub use report::Report;
pub use scalar::Real;
pub use verify::{verify_all, Tolerances};

pub type Matrix = linalg::DenseMatrix<f64>;
pub type SparseMatrix = linalg::SparseSymmetric<f64>;
