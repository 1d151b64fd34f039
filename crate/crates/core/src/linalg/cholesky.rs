use crate::error::{Error, Result};
use crate::Real;

use super::{DenseMatrix, KernelTolerances};

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = m`.
///
/// A pivot at or below `spd_tolerance × max diagonal` is reported as
/// [`Error::NotSpd`]. Symmetry is not re-checked here; only the lower
/// triangle of `m` is read.
pub fn cholesky_spd<T: Real>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    cholesky_spd_with(m, &KernelTolerances::default())
}

pub fn cholesky_spd_with<T: Real>(m: &DenseMatrix<T>, tol: &KernelTolerances) -> Result<DenseMatrix<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cholesky of {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let n = m.rows();
    let max_diag = m.diagonal().into_iter().fold(T::zero(), |a, d| a.max(d.abs()));
    let threshold = T::lit(tol.spd) * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > threshold) || d <= T::zero() {
            return Err(Error::NotSpd {
                index: j,
                pivot: d.as_f64(),
            });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L·y = b` for lower-triangular `L`.
pub fn forward_substitute<T: Real>(l: &DenseMatrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Solves `Lᵀ·x = y` for lower-triangular `L`.
pub fn back_substitute_transposed<T: Real>(l: &DenseMatrix<T>, y: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut x = y.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `m·X = B` column by column with a precomputed factor of `m`.
pub fn cholesky_solve<T: Real>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let cols: Vec<Vec<T>> = (0..b.cols())
        .map(|j| back_substitute_transposed(l, &forward_substitute(l, &b.column(j))))
        .collect();
    DenseMatrix::from_columns(b.rows(), &cols)
}

/// `m⁻¹` for SPD `m`.
pub fn spd_inverse<T: Real>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let l = cholesky_spd(m)?;
    Ok(cholesky_solve(&l, &DenseMatrix::identity(m.rows())))
}

/// `L⁻¹·B` for lower-triangular `L`.
pub fn lower_solve<T: Real>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let cols: Vec<Vec<T>> = (0..b.cols()).map(|j| forward_substitute(l, &b.column(j))).collect();
    DenseMatrix::from_columns(b.rows(), &cols)
}

/// `L⁻ᵀ·B` for lower-triangular `L`.
pub fn lower_transpose_solve<T: Real>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let cols: Vec<Vec<T>> = (0..b.cols())
        .map(|j| back_substitute_transposed(l, &b.column(j)))
        .collect();
    DenseMatrix::from_columns(b.rows(), &cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = DenseMatrix<f64>;

    #[test]
    fn identity_factor_is_identity() {
        assert_eq!(cholesky_spd(&M::identity(3)).unwrap(), M::identity(3));
    }

    #[test]
    fn hand_two_by_two() {
        // 4 = 2², 2 = 2·1, 5 = 1² + 2²
        let l = cholesky_spd(&M::from_rows(&[&[4.0, 2.0], &[2.0, 5.0]])).unwrap();
        assert_eq!(l, M::from_rows(&[&[2.0, 0.0], &[1.0, 2.0]]));
    }

    #[test]
    fn indefinite_is_rejected() {
        let err = cholesky_spd(&M::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap_err();
        assert!(matches!(err, Error::NotSpd { index: 1, .. }));
    }

    #[test]
    fn tiny_pivot_relative_to_diagonal_is_rejected() {
        let m = M::from_rows(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-14]]);
        assert!(cholesky_spd(&m).is_err());
    }

    #[test]
    fn single_precision_factorization() {
        let m = DenseMatrix::<f32>::from_rows(&[&[4.0, 2.0], &[2.0, 5.0]]);
        let l = cholesky_spd(&m).unwrap();
        assert!((&(&l * &l.transpose()) - &m).max_abs() < 1e-6);
    }

    #[test]
    fn inverse_reconstructs_identity() {
        let m = M::from_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 2.0]]);
        let inv = spd_inverse(&m).unwrap();
        assert!((&(&m * &inv) - &M::identity(3)).max_abs() < 1e-14);
    }
}
