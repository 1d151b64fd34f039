//! Generalized symmetric eigenproblems by Cholesky reduction and cyclic
//! Jacobi rotations, plus the spectral helpers built on them.

use crate::error::{Error, Result};
use crate::Real;

use super::cholesky::{cholesky_spd_with, lower_solve, lower_transpose_solve};
use super::{DenseMatrix, KernelTolerances};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of an operator that is selfadjoint for a Gram matrix `G`.
///
/// `values` ascend; column `i` of `vectors` pairs with `values[i]` and the
/// columns satisfy `vᵢᵀ·G·vⱼ = δᵢⱼ`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub values: Vec<T>,
    pub vectors: DenseMatrix<T>,
    gram: DenseMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn gram(&self) -> &DenseMatrix<T> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_abs_value(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    /// `Σ f(λᵢ)·vᵢ·vᵢᵀ·G`, the functional calculus on the decomposed operator.
    pub fn apply_fn(&self, f: impl Fn(T) -> T) -> DenseMatrix<T> {
        let n = self.dim();
        let gv = self.gram.matmul(&self.vectors);
        let mut out = DenseMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == T::zero() {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * gv[(j, k)];
                }
            }
        }
        out
    }

    /// `G`-orthogonal projector onto the span of the selected eigenvectors.
    pub fn projector(&self, keep: impl Fn(usize, T) -> bool) -> DenseMatrix<T> {
        let idx: Vec<usize> = self
            .values
            .iter()
            .enumerate()
            .filter(|&(i, &l)| keep(i, l))
            .map(|(i, _)| i)
            .collect();
        let v = self.vectors.select_columns(&idx);
        v.matmul(&v.transpose()).matmul(&self.gram)
    }
}

/// Cyclic Jacobi on a plain symmetric matrix. Returns unsorted eigenvalues
/// and the orthogonal matrix of eigenvectors.
///
/// Sweeps visit pairs `(p, q)` in row-major order and stop once the
/// off-diagonal Frobenius norm drops to `off_tol × ‖A‖_F`.
pub fn jacobi_symmetric<T: Real>(a: &DenseMatrix<T>, off_tol: f64) -> Result<(Vec<T>, DenseMatrix<T>)> {
    assert!(a.is_square());
    let n = a.rows();
    let mut a = a.symmetric_part();
    let mut v = DenseMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = T::tol(off_tol) * scale;
    let tiny = T::epsilon() * T::lit(1e-3);

    let off_norm = |a: &DenseMatrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= target {
            return Ok((a.diagonal(), v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if apq.abs() <= tiny * (app.abs() * aqq.abs()).sqrt() {
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    continue;
                }
                let tau = (aqq - app) / (apq + apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let residual = off_norm(&a);
    if residual <= target {
        Ok((a.diagonal(), v))
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_SWEEPS,
            residual: residual.as_f64(),
        })
    }
}

/// Solves `a·v = λ·v` where `a` is selfadjoint for the inner product `gram`.
pub fn sym_eigen<T: Real>(a: &DenseMatrix<T>, gram: &DenseMatrix<T>) -> Result<EigenDecomposition<T>> {
    sym_eigen_with(a, gram, &KernelTolerances::default())
}

pub fn sym_eigen_with<T: Real>(
    a: &DenseMatrix<T>,
    gram: &DenseMatrix<T>,
    tol: &KernelTolerances,
) -> Result<EigenDecomposition<T>> {
    if !a.is_square() || a.shape() != gram.shape() {
        return Err(Error::DimensionMismatch(format!(
            "eigenproblem with operator {:?} and Gram {:?}",
            a.shape(),
            gram.shape()
        )));
    }
    let l = cholesky_spd_with(gram, tol)?;
    let s = gram.matmul(a);
    let s_norm = s.frobenius_norm();
    let asym = s.asymmetry();
    if asym > T::tol(tol.selfadjoint) * s_norm {
        return Err(Error::NotSelfadjoint {
            residual: (asym / s_norm).as_f64(),
        });
    }
    let s = s.symmetric_part();
    // C = L⁻¹·S·L⁻ᵀ
    let y = lower_solve(&l, &s);
    let c = lower_solve(&l, &y.transpose()).symmetric_part();
    let (values, w) = jacobi_symmetric(&c, tol.jacobi_off_diagonal)?;
    let vectors = lower_transpose_solve(&l, &w);

    // Insertion sort that leaves near-ties in Jacobi order, so a degenerate
    // diagonal input keeps its coordinate vectors in place.
    let tie = T::epsilon() * T::lit(64.0) * values.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let mut order: Vec<usize> = (0..values.len()).collect();
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && values[order[j - 1]] > values[order[j]] + tie {
            order.swap(j - 1, j);
            j -= 1;
        }
    }
    Ok(EigenDecomposition {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: vectors.select_columns(&order),
        gram: gram.clone(),
    })
}

/// Gram-orthonormal basis of `{v : m·v = 0}` for `m` selfadjoint w.r.t.
/// `gram`. Eigenvalues with `|λ| ≤ rank_tolerance × max|λ|` count as zero.
pub fn null_space<T: Real>(m: &DenseMatrix<T>, gram: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    null_space_with(m, gram, &KernelTolerances::default())
}

pub fn null_space_with<T: Real>(
    m: &DenseMatrix<T>,
    gram: &DenseMatrix<T>,
    tol: &KernelTolerances,
) -> Result<DenseMatrix<T>> {
    let eig = sym_eigen_with(m, gram, tol)?;
    let threshold = T::tol(tol.rank) * eig.max_abs_value();
    let idx: Vec<usize> = (0..eig.dim()).filter(|&i| eig.values[i].abs() <= threshold).collect();
    Ok(eig.vectors.select_columns(&idx))
}

/// Moore–Penrose inverse of an operator selfadjoint w.r.t. `gram`, with
/// eigenvalues below `rel_tol × max|λ|` treated as zero. The flag reports
/// whether any eigenvalue was dropped.
pub fn selfadjoint_pinv<T: Real>(
    m: &DenseMatrix<T>,
    gram: &DenseMatrix<T>,
    rel_tol: f64,
) -> Result<(DenseMatrix<T>, bool)> {
    let eig = sym_eigen(m, gram)?;
    let threshold = T::tol(rel_tol) * eig.max_abs_value();
    let singular = eig.values.iter().any(|l| l.abs() <= threshold);
    let pinv = eig.apply_fn(|l| if l.abs() <= threshold { T::zero() } else { T::one() / l });
    Ok((pinv, singular))
}

/// Singular values of a plain matrix, descending.
///
/// Computed as the nonnegative eigenvalues of `[[0, M], [Mᵀ, 0]]`, so small
/// singular values keep absolute accuracy `ε‖M‖` instead of `√ε‖M‖`.
pub fn singular_values<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Ok(Vec::new());
    }
    let aug = DenseMatrix::from_blocks(&DenseMatrix::zeros(r, r), m, &m.transpose(), &DenseMatrix::zeros(c, c));
    let (mut values, _) = jacobi_symmetric(&aug, KernelTolerances::default().jacobi_off_diagonal)?;
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values.into_iter().take(k).map(|v| v.max(T::zero())).collect())
}

/// Numerical rank: singular values above `rel_tol × σ_max`.
pub fn rank<T: Real>(m: &DenseMatrix<T>, rel_tol: f64) -> Result<usize> {
    let sv = singular_values(m)?;
    let smax = sv.first().copied().unwrap_or(T::zero());
    if smax == T::zero() {
        return Ok(0);
    }
    let threshold = T::tol(rel_tol) * smax;
    Ok(sv.iter().filter(|&&s| s > threshold).count())
}

/// Euclidean-orthonormal basis of `ker M` for a plain rectangular matrix,
/// read off the near-zero eigenvectors of `[[0, M], [Mᵀ, 0]]`. The
/// threshold is `rel_tol × σ_max`, or `abs_floor` when that is larger.
pub fn kernel<T: Real>(m: &DenseMatrix<T>, rel_tol: f64, abs_floor: T) -> Result<DenseMatrix<T>> {
    let (r, c) = m.shape();
    if c == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    if r == 0 {
        return Ok(DenseMatrix::identity(c));
    }
    let aug = DenseMatrix::from_blocks(&DenseMatrix::zeros(r, r), m, &m.transpose(), &DenseMatrix::zeros(c, c));
    let (values, vectors) = jacobi_symmetric(&aug, KernelTolerances::default().jacobi_off_diagonal)?;
    let smax = values.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let threshold = (T::tol(rel_tol) * smax).max(abs_floor);
    // Eigenvalues come in pairs ±σ plus |r − c| zeros; the positive ones count the rank.
    let rank = values.iter().filter(|&&v| v > threshold).count();
    let dim = c - rank.min(c);
    if dim == 0 {
        return Ok(DenseMatrix::zeros(c, 0));
    }
    // Bottom blocks of the near-zero eigenvectors span the right kernel; left-kernel
    // eigenvectors contribute only rounding there, so keep the dominant `dim` directions.
    let candidates: Vec<Vec<T>> = (0..values.len())
        .filter(|&i| values[i].abs() <= threshold)
        .map(|i| (r..r + c).map(|row| vectors[(row, i)]).collect())
        .collect();
    let cm = DenseMatrix::from_columns(c, &candidates);
    let (w, u) = jacobi_symmetric(
        &cm.matmul(&cm.transpose()),
        KernelTolerances::default().jacobi_off_diagonal,
    )?;
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| w[b].partial_cmp(&w[a]).unwrap_or(std::cmp::Ordering::Equal));
    let top: Vec<Vec<T>> = order[..dim.min(candidates.len())]
        .iter()
        .map(|&i| u.column(i))
        .collect();
    Ok(orthonormalize(c, &top, &DenseMatrix::identity(c)))
}

/// Modified Gram–Schmidt with one re-orthogonalization pass against the
/// inner product `gram`. Columns whose remaining norm falls below `1e-8`
/// of their original norm are dropped. Column order is preserved.
pub fn orthonormalize<T: Real>(dim: usize, vectors: &[Vec<T>], gram: &DenseMatrix<T>) -> DenseMatrix<T> {
    let inner = |a: &[T], b: &[T]| super::vector::gram_inner(gram, a, b);
    let drop_tol = T::tol(1e-8);
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let original = inner(v, v).max(T::zero()).sqrt();
        if original == T::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &w);
                super::vector::axpy(-proj, b, &mut w);
            }
        }
        let n = inner(&w, &w).max(T::zero()).sqrt();
        if n > drop_tol * original {
            basis.push(w.iter().map(|&x| x / n).collect());
        }
    }
    DenseMatrix::from_columns(dim, &basis)
}

/// Operator norm of `m: (ℝⁿ, dom_gram) → (ℝᵐ, cod_gram)`.
pub fn operator_norm<T: Real>(m: &DenseMatrix<T>, dom_gram: &DenseMatrix<T>, cod_gram: &DenseMatrix<T>) -> Result<T> {
    let l_dom = cholesky_spd_with(dom_gram, &KernelTolerances::default())?;
    let l_cod = cholesky_spd_with(cod_gram, &KernelTolerances::default())?;
    // ‖M‖ = σ_max(L_codᵀ · M · L_dom⁻ᵀ)
    let x = l_cod
        .transpose()
        .matmul(&lower_solve(&l_dom, &m.transpose()).transpose());
    Ok(singular_values(&x)?.first().copied().unwrap_or(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = DenseMatrix<f64>;

    #[test]
    fn kernel_of_tall_full_rank_matrix_is_empty() {
        let m = M::from_rows(&[&[1.0, 2.0], &[0.0, 1.0], &[3.0, -1.0], &[1.0, 1.0]]);
        assert_eq!(kernel(&m, 1e-9, 0.0).unwrap().cols(), 0);
        let wide = m.transpose();
        let k = kernel(&wide, 1e-9, 0.0).unwrap();
        assert_eq!(k.cols(), 2);
        assert!(wide.matmul(&k).max_abs() < 1e-12);
    }

    #[test]
    fn weighted_norm_of_the_identity_is_one() {
        let g = M::from_rows(&[&[4.0, 1.0], &[1.0, 2.0]]);
        let n = operator_norm(&M::identity(2), &g, &g).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_input_is_already_decomposed() {
        let eig = sym_eigen(&M::from_diag(&[2.0, 3.0]), &M::identity(2)).unwrap();
        assert_eq!(eig.values, vec![2.0, 3.0]);
        assert_eq!(eig.vectors, M::identity(2));
    }

    #[test]
    fn path_laplacian_spectrum() {
        // det [[1-λ, -1], [-1, 1-λ]] = λ(λ - 2)
        let eig = sym_eigen(&M::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]), &M::identity(2)).unwrap();
        assert!(eig.values[0].abs() < 1e-15);
        assert!((eig.values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_normalization() {
        let eig = sym_eigen(&M::identity(2), &M::from_diag(&[1.0, 2.0])).unwrap();
        assert!(eig.values.iter().all(|l| (l - 1.0).abs() < 1e-15));
        let v = &eig.vectors;
        assert!((v[(0, 0)].abs() - 1.0).abs() < 1e-15 && v[(1, 0)].abs() < 1e-15);
        assert!(v[(0, 1)].abs() < 1e-15 && (v[(1, 1)].abs() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_selfadjoint_and_indefinite_gram() {
        let a = M::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            sym_eigen(&a, &M::identity(2)),
            Err(Error::NotSelfadjoint { .. })
        ));
        let g = M::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(sym_eigen(&M::identity(2), &g), Err(Error::NotSpd { .. })));
    }

    #[test]
    fn null_space_examples() {
        let k = null_space(&M::from_diag(&[0.0, 1.0]), &M::identity(2)).unwrap();
        assert_eq!(k.cols(), 1);
        assert!((k[(0, 0)].abs() - 1.0).abs() < 1e-15);

        assert_eq!(null_space(&M::identity(3), &M::identity(3)).unwrap().cols(), 0);

        let k = null_space(&M::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]), &M::identity(2)).unwrap();
        assert_eq!(k.cols(), 1);
        let s = 0.5f64.sqrt();
        assert!((k[(0, 0)].abs() - s).abs() < 1e-15 && (k[(1, 0)] - k[(0, 0)]).abs() < 1e-15);
    }

    #[test]
    fn singular_values_and_rank() {
        let m = M::from_rows(&[&[3.0, 0.0], &[0.0, 4.0], &[0.0, 0.0]]);
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
        let r1 = M::from_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        assert_eq!(rank(&r1, 1e-9).unwrap(), 1);
        let k = kernel(&r1, 1e-9, 0.0).unwrap();
        assert_eq!(k.cols(), 2);
        assert!(r1.matmul(&k).max_abs() < 1e-13);
    }

    #[test]
    fn operator_norm_with_weights() {
        // T = I from (ℝ, 1) to (ℝ, 4): ‖T‖ = 2.
        let n = operator_norm(&M::identity(1), &M::identity(1), &M::from_diag(&[4.0])).unwrap();
        assert!((n - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_precision_eigen() {
        let a = DenseMatrix::<f32>::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let eig = sym_eigen(&a, &DenseMatrix::identity(2)).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-5 && (eig.values[1] - 3.0).abs() < 1e-5);
    }
}
