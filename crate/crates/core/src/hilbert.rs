//! Finite-dimensional Hilbert spaces with non-Euclidean inner products,
//! operators between them, direct sums and common dense domains.

use crate::error::{Error, Result};
use crate::linalg::vector::{gram_inner, norm};
use crate::linalg::{
    cholesky_solve, cholesky_spd, kernel, lower_solve, operator_norm, orthonormalize, rank, singular_values,
    spd_inverse, DenseMatrix,
};
use crate::Real;

const RANK_TOL: f64 = 1e-9;

/// `ℝⁿ` with inner product `uᵀ·G·v`.
#[derive(Clone, Debug)]
pub struct WeightedSpace<T> {
    gram: DenseMatrix<T>,
    chol: DenseMatrix<T>,
    label: String,
}

impl<T: Real> WeightedSpace<T> {
    pub fn new(gram: DenseMatrix<T>, label: impl Into<String>) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Gram matrix is {}x{}",
                gram.rows(),
                gram.cols()
            )));
        }
        let asym = gram.asymmetry();
        let scale = gram.frobenius_norm();
        if asym > T::tol(1e-12) * scale {
            return Err(Error::NotSelfadjoint {
                residual: (asym / scale).as_f64(),
            });
        }
        let gram = gram.symmetric_part();
        let chol = cholesky_spd(&gram)?;
        Ok(Self {
            gram,
            chol,
            label: label.into(),
        })
    }

    pub fn euclidean(dim: usize, label: impl Into<String>) -> Self {
        Self {
            gram: DenseMatrix::identity(dim),
            chol: DenseMatrix::identity(dim),
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &DenseMatrix<T> {
        &self.gram
    }

    /// Lower Cholesky factor of the Gram matrix.
    pub fn cholesky(&self) -> &DenseMatrix<T> {
        &self.chol
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        gram_inner(&self.gram, u, v)
    }

    pub fn norm(&self, u: &[T]) -> T {
        self.inner(u, u).max(T::zero()).sqrt()
    }

    /// `G⁻¹·m`.
    pub fn gram_solve(&self, m: &DenseMatrix<T>) -> DenseMatrix<T> {
        if self.is_diagonal() {
            // Plain division keeps diagonal weights exact.
            return DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] / self.gram[(i, i)]);
        }
        cholesky_solve(&self.chol, m)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.gram[(i, j)] == T::zero()))
    }

    /// Coordinates in which this space's inner product is Euclidean: `Lᵀ·u`.
    pub fn whiten(&self, m: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.chol.transpose().matmul(m)
    }

    /// True when both Gram matrices are entrywise equal.
    pub fn same_inner_product(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

/// A linear map between two weighted spaces, stored as `codomain.dim × domain.dim`.
#[derive(Clone, Debug)]
pub struct OperatorBetween<T> {
    matrix: DenseMatrix<T>,
    domain: WeightedSpace<T>,
    codomain: WeightedSpace<T>,
}

impl<T: Real> OperatorBetween<T> {
    pub fn new(matrix: DenseMatrix<T>, domain: WeightedSpace<T>, codomain: WeightedSpace<T>) -> Result<Self> {
        if matrix.shape() != (codomain.dim(), domain.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix {:?} between spaces of dimension {} and {}",
                matrix.shape(),
                domain.dim(),
                codomain.dim()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidInput("operator matrix has non-finite entries".into()));
        }
        Ok(Self {
            matrix,
            domain,
            codomain,
        })
    }

    pub fn identity(space: &WeightedSpace<T>) -> Self {
        Self {
            matrix: DenseMatrix::identity(space.dim()),
            domain: space.clone(),
            codomain: space.clone(),
        }
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn domain(&self) -> &WeightedSpace<T> {
        &self.domain
    }

    pub fn codomain(&self) -> &WeightedSpace<T> {
        &self.codomain
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.matrix.matvec(v)
    }

    /// `G₁⁻¹·Tᵀ·G₂`, characterized by `⟨Tu, v⟩₂ = ⟨u, T*v⟩₁`.
    pub fn adjoint(&self) -> Self {
        let m = self
            .domain
            .gram_solve(&self.matrix.transpose().matmul(self.codomain.gram()));
        Self {
            matrix: m,
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.codomain.dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch("composition of incompatible operators".into()));
        }
        Ok(Self {
            matrix: self.matrix.matmul(&inner.matrix),
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
        })
    }

    pub fn hs_norm(&self) -> T {
        hs_norm(&self.matrix, &self.domain, &self.codomain)
    }

    /// Operator norm between the weighted spaces.
    pub fn norm(&self) -> Result<T> {
        operator_norm(&self.matrix, self.domain.gram(), self.codomain.gram())
    }

    /// `‖G·A − (G·A)ᵀ‖_F / ‖G·A‖_F` for an operator on a single space; zero for the zero operator.
    pub fn selfadjoint_residual(&self) -> T {
        let s = self.codomain.gram().matmul(&self.matrix);
        let scale = s.frobenius_norm();
        if scale == T::zero() {
            T::zero()
        } else {
            s.asymmetry() / scale
        }
    }
}

/// Hilbert–Schmidt norm of `m: dom → cod`, `‖L_codᵀ·m·L_dom⁻ᵀ‖_F`. It
/// bounds the operator norm from above.
pub fn hs_norm<T: Real>(m: &DenseMatrix<T>, dom: &WeightedSpace<T>, cod: &WeightedSpace<T>) -> T {
    let right = lower_solve(dom.cholesky(), &m.transpose()).transpose();
    cod.whiten(&right).frobenius_norm()
}

/// Free-function form of [`OperatorBetween::adjoint`].
pub fn adjoint<T: Real>(t: &OperatorBetween<T>) -> OperatorBetween<T> {
    t.adjoint()
}

/// `H₁ ⊕ H₂` with the block-diagonal Gram matrix.
#[derive(Clone, Debug)]
pub struct DirectSum<T> {
    pub first: WeightedSpace<T>,
    pub second: WeightedSpace<T>,
}

impl<T: Real> DirectSum<T> {
    pub fn new(first: WeightedSpace<T>, second: WeightedSpace<T>) -> Self {
        Self { first, second }
    }

    pub fn dim(&self) -> usize {
        self.first.dim() + self.second.dim()
    }

    pub fn gram(&self) -> DenseMatrix<T> {
        DenseMatrix::block_diag(self.first.gram(), self.second.gram())
    }

    pub fn space(&self) -> WeightedSpace<T> {
        let chol = DenseMatrix::block_diag(self.first.cholesky(), self.second.cholesky());
        WeightedSpace {
            gram: self.gram(),
            chol,
            label: format!("{} + {}", self.first.label(), self.second.label()),
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            first: self.second.clone(),
            second: self.first.clone(),
        }
    }

    pub fn split<'a>(&self, v: &'a [T]) -> (&'a [T], &'a [T]) {
        v.split_at(self.first.dim())
    }

    pub fn join(&self, a: &[T], b: &[T]) -> Vec<T> {
        debug_assert_eq!(a.len(), self.first.dim());
        debug_assert_eq!(b.len(), self.second.dim());
        a.iter().chain(b).copied().collect()
    }
}

/// Columns `[φ; Tφ]` for the coordinate basis `φ` of the domain.
pub fn graph_subspace<T: Real>(t: &OperatorBetween<T>) -> DenseMatrix<T> {
    DenseMatrix::identity(t.domain().dim()).vstack(t.matrix())
}

/// `V[φ; ψ] = [−ψ; φ]` from `H₁ ⊕ H₂` to `H₂ ⊕ H₁`.
pub fn v_flip<T: Real>(ds: &DirectSum<T>) -> OperatorBetween<T> {
    let (n1, n2) = (ds.first.dim(), ds.second.dim());
    let m = DenseMatrix::from_blocks(
        &DenseMatrix::zeros(n2, n1),
        &DenseMatrix::identity(n2).scale(-T::one()),
        &DenseMatrix::identity(n1),
        &DenseMatrix::zeros(n1, n2),
    );
    OperatorBetween {
        matrix: m,
        domain: ds.space(),
        codomain: ds.swapped().space(),
    }
}

#[derive(Clone, Debug)]
pub struct GraphCheck<T> {
    /// Per column of the graph of `T*`: relative size of its projection onto `V·G_T`.
    pub residuals: Vec<T>,
    /// `dim(V·G_T) + dim(G_{T*})`, which must fill the swapped sum.
    pub combined_dim: usize,
    pub ambient_dim: usize,
    pub pass: bool,
}

/// Checks `G_{T*} = (V·G_T)^⊥` inside `H₂ ⊕ H₁`.
pub fn adjoint_graph_check<T: Real>(t: &OperatorBetween<T>, tol: f64) -> Result<GraphCheck<T>> {
    let ds = DirectSum::new(t.domain().clone(), t.codomain().clone());
    let sw = ds.swapped();
    let sw_gram = sw.gram();
    let vg = v_flip(&ds).matrix().matmul(&graph_subspace(t));
    let basis = orthonormalize(sw.dim(), &vg.columns(), &sw_gram);
    let g_adj = graph_subspace(&t.adjoint());

    let mut residuals = Vec::with_capacity(g_adj.cols());
    for g in g_adj.columns() {
        let g_norm = gram_inner(&sw_gram, &g, &g).sqrt();
        let coeffs: Vec<T> = basis.columns().iter().map(|b| gram_inner(&sw_gram, b, &g)).collect();
        residuals.push(norm(&coeffs) / g_norm);
    }
    let combined = vg.hstack(&g_adj);
    let combined_dim = rank(&sw.space().whiten(&combined), RANK_TOL)?;
    let pass = combined_dim == sw.dim() && residuals.iter().all(|&r| r <= T::tol(tol));
    Ok(GraphCheck {
        residuals,
        combined_dim,
        ambient_dim: sw.dim(),
        pass,
    })
}

/// A subspace `𝒟` given in ambient coordinates, together with its two
/// coordinate maps into `H₁` and `H₂`.
#[derive(Clone, Debug)]
pub struct CommonDomain<T> {
    basis: DenseMatrix<T>,
    embed1: OperatorBetween<T>,
    embed2: OperatorBetween<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Density {
    pub rank: usize,
    pub dim: usize,
}

impl Density {
    pub fn dense(&self) -> bool {
        self.rank == self.dim
    }
}

impl<T: Real> CommonDomain<T> {
    pub fn new(basis: DenseMatrix<T>, embed1: OperatorBetween<T>, embed2: OperatorBetween<T>) -> Result<Self> {
        let ambient = basis.rows();
        if embed1.domain().dim() != ambient || embed2.domain().dim() != ambient {
            return Err(Error::DimensionMismatch(format!(
                "embeddings act on {} and {} coordinates, basis lives in {}",
                embed1.domain().dim(),
                embed2.domain().dim(),
                ambient
            )));
        }
        Ok(Self { basis, embed1, embed2 })
    }

    /// Both spaces on the same coordinates and `𝒟` everything.
    pub fn same_coordinates(h1: WeightedSpace<T>, h2: WeightedSpace<T>) -> Result<Self> {
        if h1.dim() != h2.dim() {
            return Err(Error::DimensionMismatch(format!(
                "spaces of dimension {} and {}",
                h1.dim(),
                h2.dim()
            )));
        }
        let n = h1.dim();
        let ambient = WeightedSpace::euclidean(n, "coordinates");
        let e1 = OperatorBetween::new(DenseMatrix::identity(n), ambient.clone(), h1)?;
        let e2 = OperatorBetween::new(DenseMatrix::identity(n), ambient, h2)?;
        Self::new(DenseMatrix::identity(n), e1, e2)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &DenseMatrix<T> {
        &self.basis
    }

    pub fn embed1(&self) -> &OperatorBetween<T> {
        &self.embed1
    }

    pub fn embed2(&self) -> &OperatorBetween<T> {
        &self.embed2
    }

    pub fn h1(&self) -> &WeightedSpace<T> {
        self.embed1.codomain()
    }

    pub fn h2(&self) -> &WeightedSpace<T> {
        self.embed2.codomain()
    }

    /// Basis of `𝒟` as vectors of `H₁`.
    pub fn image1(&self) -> DenseMatrix<T> {
        self.embed1.matrix().matmul(&self.basis)
    }

    /// Basis of `𝒟` as vectors of `H₂`.
    pub fn image2(&self) -> DenseMatrix<T> {
        self.embed2.matrix().matmul(&self.basis)
    }

    /// Rank of `𝒟` inside `H₁` against `dim H₁`.
    pub fn density(&self) -> Result<Density> {
        Ok(Density {
            rank: rank(&self.h1().whiten(&self.image1()), RANK_TOL)?,
            dim: self.h1().dim(),
        })
    }

    /// Directions of the basis span with zero `H₁` norm, as coefficient vectors.
    pub fn null_directions(&self) -> Result<DenseMatrix<T>> {
        kernel(&self.h1().whiten(&self.image1()), RANK_TOL, T::zero())
    }

    /// Largest `‖·‖₂` picked up by a `‖·‖₁`-null direction, relative to the
    /// size of the second embedding.
    pub fn closability_defect(&self) -> Result<T> {
        let null = self.null_directions()?;
        if null.cols() == 0 {
            return Ok(T::zero());
        }
        let w2 = self.h2().whiten(&self.image2());
        let scale = singular_values(&w2)?.first().copied().unwrap_or(T::zero());
        if scale == T::zero() {
            return Ok(T::zero());
        }
        let leak = singular_values(&w2.matmul(&null))?
            .first()
            .copied()
            .unwrap_or(T::zero());
        Ok(leak / scale)
    }

    /// The inclusion `J: H₁ ⊇ 𝒟 → H₂`, `φ ↦ φ`, as a matrix on `H₁` coordinates.
    ///
    /// Fails with [`Error::NotDense`] when `𝒟` does not span `H₁` and with
    /// [`Error::NotClosable`] when some vector of `𝒟` has zero `H₁` norm but
    /// nonzero `H₂` norm.
    pub fn inclusion(&self) -> Result<OperatorBetween<T>> {
        let density = self.density()?;
        if !density.dense() {
            return Err(Error::NotDense {
                rank: density.rank,
                dim: density.dim,
            });
        }
        let defect = self.closability_defect()?;
        if defect > T::tol(RANK_TOL) {
            return Err(Error::NotClosable {
                residual: defect.as_f64(),
            });
        }
        // Right inverse of the first image: X1ᵀ(X1·X1ᵀ)⁻¹.
        let x1 = self.image1();
        let right_inv = x1.transpose().matmul(&spd_inverse(&x1.matmul(&x1.transpose()))?);
        OperatorBetween::new(self.image2().matmul(&right_inv), self.h1().clone(), self.h2().clone())
    }
}

/// Spanning set of `𝒟* = {h ∈ H₂ : φ ↦ ⟨φ, h⟩₂ is ‖·‖₁-bounded on 𝒟}`.
///
/// At finite dimension the only obstruction is a `‖·‖₁`-null direction `k`
/// with `⟨k, h⟩₂ ≠ 0`, so `𝒟*` is the `G₂`-complement of the `H₂` images
/// of those directions. Columns are Euclidean-orthonormal.
pub fn dual_domain<T: Real>(cd: &CommonDomain<T>) -> Result<DenseMatrix<T>> {
    let n2 = cd.h2().dim();
    let null = cd.null_directions()?;
    if null.cols() == 0 {
        return Ok(DenseMatrix::identity(n2));
    }
    let images = cd.image2().matmul(&null);
    let functionals = images.transpose().matmul(cd.h2().gram());
    let w2 = cd.h2().whiten(&cd.image2());
    let scale = singular_values(&w2)?.first().copied().unwrap_or(T::zero())
        * singular_values(cd.h2().cholesky())?
            .first()
            .copied()
            .unwrap_or(T::zero());
    kernel(&functionals, RANK_TOL, T::tol(RANK_TOL) * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = DenseMatrix<f64>;

    fn space(g: M) -> WeightedSpace<f64> {
        WeightedSpace::new(g, "h").unwrap()
    }

    #[test]
    fn adjoint_examples() {
        let e = space(M::identity(2));
        let t = OperatorBetween::new(M::identity(2), e.clone(), e.clone()).unwrap();
        assert_eq!(adjoint(&t).matrix(), &M::identity(2));

        let t = OperatorBetween::new(M::identity(2), space(M::from_diag(&[1.0, 2.0])), e.clone()).unwrap();
        assert!((adjoint(&t).matrix() - &M::from_diag(&[1.0, 0.5])).max_abs() < 1e-15);

        let t = OperatorBetween::new(M::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]), e.clone(), e).unwrap();
        assert_eq!(adjoint(&t).matrix(), &M::from_rows(&[&[0.0, 0.0], &[1.0, 0.0]]));
    }

    #[test]
    fn graph_columns() {
        let e = WeightedSpace::euclidean(1, "e");
        let t = OperatorBetween::new(M::from_rows(&[&[2.0]]), e.clone(), e).unwrap();
        assert_eq!(graph_subspace(&t), M::from_rows(&[&[1.0], &[2.0]]));
    }

    #[test]
    fn flip_squares_to_minus_identity() {
        let ds = DirectSum::new(
            WeightedSpace::<f64>::euclidean(1, "a"),
            WeightedSpace::euclidean(1, "b"),
        );
        let v = v_flip(&ds);
        assert_eq!(v.apply(&[3.0, 5.0]), vec![-5.0, 3.0]);
        let back = v_flip(&ds.swapped());
        assert_eq!(back.apply(&v.apply(&[3.0, 5.0])), vec![-3.0, -5.0]);
        assert_eq!(v.adjoint().matrix(), &M::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]));
    }

    #[test]
    fn graph_check_scalar() {
        let e = WeightedSpace::euclidean(1, "e");
        for value in [0.0, 2.0] {
            let t = OperatorBetween::new(M::from_rows(&[&[value]]), e.clone(), e.clone()).unwrap();
            let check = adjoint_graph_check(&t, 1e-12).unwrap();
            assert!(check.pass, "{check:?}");
        }
    }

    #[test]
    fn dual_domain_cases() {
        let cd = CommonDomain::same_coordinates(space(M::identity(2)), space(M::from_diag(&[2.0, 3.0]))).unwrap();
        assert_eq!(dual_domain(&cd).unwrap().cols(), 2);

        // μ₁ = δ_a, μ₂ = δ_b on {a, b}: each L² sees one coordinate.
        let ambient = WeightedSpace::euclidean(2, "functions");
        let e1 = OperatorBetween::new(M::from_rows(&[&[1.0, 0.0]]), ambient.clone(), space(M::identity(1))).unwrap();
        let e2 = OperatorBetween::new(M::from_rows(&[&[0.0, 1.0]]), ambient, space(M::identity(1))).unwrap();
        let cd = CommonDomain::new(M::identity(2), e1, e2).unwrap();
        assert!(cd.density().unwrap().dense());
        assert_eq!(dual_domain(&cd).unwrap().cols(), 0);
        assert!(matches!(cd.inclusion(), Err(Error::NotClosable { .. })));
    }

    #[test]
    fn rejects_asymmetric_gram() {
        let err = WeightedSpace::<f64>::new(M::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]), "bad").unwrap_err();
        assert!(matches!(err, Error::NotSelfadjoint { .. }));
    }
}
