//! Dense and sparse linear algebra used by every other module.

mod cg;
mod cholesky;
mod dense;
mod eigen;
mod sparse;
pub mod vector;

pub use cg::{solve_spd, solve_spd_pinned, solve_spd_with};
pub use cholesky::{
    back_substitute_transposed, cholesky_solve, cholesky_spd, cholesky_spd_with, forward_substitute, lower_solve,
    lower_transpose_solve, spd_inverse,
};
pub use dense::DenseMatrix;
pub use eigen::{
    jacobi_symmetric, kernel, null_space, null_space_with, operator_norm, orthonormalize, rank, selfadjoint_pinv,
    singular_values, sym_eigen, sym_eigen_with, EigenDecomposition,
};
pub use sparse::SparseSymmetric;

/// Thresholds used by the kernel routines. All are relative.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTolerances {
    /// Cholesky pivot floor, as a multiple of the largest diagonal entry.
    pub spd: f64,
    /// Jacobi stops once the off-diagonal Frobenius norm is this fraction of `‖A‖_F`.
    pub jacobi_off_diagonal: f64,
    /// Eigenvalues below `rank × max|λ|` count as zero.
    pub rank: f64,
    /// CG stops at `‖m·x − rhs‖ ≤ cg_residual × ‖rhs‖`.
    pub cg_residual: f64,
    /// CG gives up after `cg_max_iter_factor × dim` iterations.
    pub cg_max_iter_factor: usize,
    /// Allowed `‖G·A − (G·A)ᵀ‖_F / ‖G·A‖_F` before a matrix is rejected as not selfadjoint.
    pub selfadjoint: f64,
    /// Allowed component of a grounded right-hand side along the constants, relative to `‖rhs‖`.
    pub kernel_consistency: f64,
}

impl Default for KernelTolerances {
    fn default() -> Self {
        Self {
            spd: 1e-12,
            jacobi_off_diagonal: 1e-13,
            rank: 1e-9,
            cg_residual: 1e-10,
            cg_max_iter_factor: 10,
            selfadjoint: 1e-10,
            kernel_consistency: 1e-10,
        }
    }
}
