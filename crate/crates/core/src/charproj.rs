//! Characteristic projections: the orthogonal projection of `H₁ ⊕ H₂` onto
//! the (closed) graph of an operator, or onto any subspace of the sum.

use crate::error::{Error, Result};
use crate::hilbert::{hs_norm, DirectSum, OperatorBetween, WeightedSpace};
use crate::linalg::{null_space, orthonormalize, selfadjoint_pinv, spd_inverse, sym_eigen, DenseMatrix};
use crate::Real;

/// Relative eigenvalue cut for pseudo-inverses and kernels of blocks.
const BLOCK_RANK_TOL: f64 = 1e-9;

/// `E = [[E₁₁, E₁₂], [E₂₁, E₂₂]]` acting on `H₁ ⊕ H₂`.
#[derive(Clone, Debug)]
pub struct BlockProjection<T> {
    pub e11: DenseMatrix<T>,
    pub e12: DenseMatrix<T>,
    pub e21: DenseMatrix<T>,
    pub e22: DenseMatrix<T>,
    pub ambient: DirectSum<T>,
}

impl<T: Real> BlockProjection<T> {
    pub fn from_full(full: &DenseMatrix<T>, ambient: DirectSum<T>) -> Self {
        let (n1, n2) = (ambient.first.dim(), ambient.second.dim());
        Self {
            e11: full.block(0, 0, n1, n1),
            e12: full.block(0, n1, n1, n2),
            e21: full.block(n1, 0, n2, n1),
            e22: full.block(n1, n1, n2, n2),
            ambient,
        }
    }

    pub fn full(&self) -> DenseMatrix<T> {
        DenseMatrix::from_blocks(&self.e11, &self.e12, &self.e21, &self.e22)
    }

    pub fn h1(&self) -> &WeightedSpace<T> {
        &self.ambient.first
    }

    pub fn h2(&self) -> &WeightedSpace<T> {
        &self.ambient.second
    }

    /// `‖E² − E‖`, Hilbert–Schmidt on the direct sum.
    pub fn idempotence_residual(&self) -> T {
        let e = self.full();
        let space = self.ambient.space();
        hs_norm(&(&e.matmul(&e) - &e), &space, &space)
    }

    /// `‖E − E*‖` for the block Gram, Hilbert–Schmidt.
    pub fn selfadjoint_residual(&self) -> T {
        let space = self.ambient.space();
        let e = self.full();
        let e_star = space.gram_solve(&e.transpose().matmul(space.gram()));
        hs_norm(&(&e - &e_star), &space, &space)
    }

    /// Blockwise Hilbert–Schmidt distance to another projection on the same sum.
    pub fn distance(&self, other: &Self) -> T {
        let space = self.ambient.space();
        hs_norm(&(&self.full() - &other.full()), &space, &space)
    }
}

/// Characteristic projection of `T: H₁ → H₂`:
/// `E₁₁ = (I+T*T)⁻¹`, `E₂₁ = T(I+T*T)⁻¹`, `E₁₂ = T*(I+TT*)⁻¹`, `E₂₂ = TT*(I+TT*)⁻¹`.
pub fn char_projection<T: Real>(t: &OperatorBetween<T>) -> Result<BlockProjection<T>> {
    let (h1, h2) = (t.domain(), t.codomain());
    let tm = t.matrix();
    let t_star = t.adjoint();
    let ts = t_star.matrix();
    // (I + T*T)⁻¹ = (G₁ + TᵀG₂T)⁻¹G₁, and symmetrically for TT*.
    let m1 = h1.gram() + &tm.transpose().matmul(h2.gram()).matmul(tm);
    let inv1 = spd_inverse(&m1.symmetric_part())?.matmul(h1.gram());
    let m2 = h2.gram() + &h2.gram().matmul(tm).matmul(ts);
    let inv2 = spd_inverse(&m2.symmetric_part())?.matmul(h2.gram());

    let e11 = inv1;
    let e21 = tm.matmul(&e11);
    let e12 = ts.matmul(&inv2);
    let e22 = tm.matmul(&e12);
    Ok(BlockProjection {
        e11,
        e12,
        e21,
        e22,
        ambient: DirectSum::new(h1.clone(), h2.clone()),
    })
}

/// `E_{T*} = [[I − E₂₂, E₂₁], [E₁₂, I − E₁₁]]` on `H₂ ⊕ H₁`.
pub fn char_projection_of_adjoint<T: Real>(e: &BlockProjection<T>) -> BlockProjection<T> {
    let i1 = DenseMatrix::identity(e.h1().dim());
    let i2 = DenseMatrix::identity(e.h2().dim());
    BlockProjection {
        e11: &i2 - &e.e22,
        e12: e.e21.clone(),
        e21: e.e12.clone(),
        e22: &i1 - &e.e11,
        ambient: e.ambient.swapped(),
    }
}

/// One named residual `‖lhs − rhs‖`.
#[derive(Clone, Debug)]
pub struct IdentityResidual<T> {
    pub name: &'static str,
    pub formula: &'static str,
    pub residual: T,
}

/// Residuals of the relations tying `T`, `T*` and the blocks of `E_T`.
///
/// The first four are the defining relations; the rest are the closed
/// forms derived from them.
pub fn stone_identities<T: Real>(t: &OperatorBetween<T>, e: &BlockProjection<T>) -> Result<Vec<IdentityResidual<T>>> {
    let (h1, h2) = (t.domain(), t.codomain());
    let tm = t.matrix();
    let ts = t.adjoint().matrix().clone();
    let i1 = DenseMatrix::identity(h1.dim());
    let i2 = DenseMatrix::identity(h2.dim());
    let ts_t = ts.matmul(tm);
    let t_ts = tm.matmul(&ts);
    // Resolvents at -1, inverted through the Gram-weighted SPD forms.
    let r1 = spd_inverse(&(h1.gram() + &h1.gram().matmul(&ts_t)).symmetric_part())?.matmul(h1.gram());
    let r2 = spd_inverse(&(h2.gram() + &h2.gram().matmul(&t_ts)).symmetric_part())?.matmul(h2.gram());

    let on11 = |m: DenseMatrix<T>| hs_norm(&m, h1, h1);
    let on22 = |m: DenseMatrix<T>| hs_norm(&m, h2, h2);
    let from1to2 = |m: DenseMatrix<T>| hs_norm(&m, h1, h2);
    let from2to1 = |m: DenseMatrix<T>| hs_norm(&m, h2, h1);

    let row = |name, formula, residual| IdentityResidual {
        name,
        formula,
        residual,
    };
    Ok(vec![
        row("T E11 = E21", "T E11 = E21", from1to2(&tm.matmul(&e.e11) - &e.e21)),
        row("T E12 = E22", "T E12 = E22", on22(&tm.matmul(&e.e12) - &e.e22)),
        row(
            "T*(I-E22) = E12",
            "T*(I - E22) = E12",
            from2to1(&ts.matmul(&(&i2 - &e.e22)) - &e.e12),
        ),
        row(
            "T* E21 = I-E11",
            "T* E21 = I - E11",
            on11(&ts.matmul(&e.e21) - &(&i1 - &e.e11)),
        ),
        row(
            "E11 = I - T*T(I+T*T)^-1",
            "E11 = I - T*T (I + T*T)^-1",
            on11(&e.e11 - &(&i1 - &ts_t.matmul(&r1))),
        ),
        row(
            "E12 = (I+T*T)^-1 T*",
            "E12 = (I + T*T)^-1 T*",
            from2to1(&e.e12 - &r1.matmul(&ts)),
        ),
        row(
            "E12 = T* - T*(I+TT*)^-1 TT*",
            "E12 = T* - T* (I + TT*)^-1 TT*",
            from2to1(&e.e12 - &(&ts - &ts.matmul(&r2).matmul(&t_ts))),
        ),
        row(
            "E21 = (I+TT*)^-1 T",
            "E21 = (I + TT*)^-1 T",
            from1to2(&e.e21 - &r2.matmul(tm)),
        ),
        row(
            "E22 = (I+TT*)^-1 TT*",
            "E22 = (I + TT*)^-1 TT*",
            on22(&e.e22 - &r2.matmul(&t_ts)),
        ),
        row(
            "E22 = T(I+T*T)^-1 T*",
            "E22 = T (I + T*T)^-1 T*",
            on22(&e.e22 - &tm.matmul(&r1).matmul(&ts)),
        ),
        row(
            "E22 = I - (I+TT*)^-1",
            "E22 = I - (I + TT*)^-1",
            on22(&e.e22 - &(&i2 - &r2)),
        ),
    ])
}

/// `E/E₁₁ = E₂₂ − E₂₁E₁₁⁻¹E₁₂` and `E/E₂₂ = E₁₁ − E₁₂E₂₂⁺E₂₁`.
#[derive(Clone, Debug)]
pub struct SchurComplements<T> {
    pub over_e11: DenseMatrix<T>,
    pub over_e22: DenseMatrix<T>,
    /// `E₂₂` was singular and its pseudo-inverse was used.
    pub e22_pseudo_inverse: bool,
}

impl<T: Real> SchurComplements<T> {
    /// Hilbert–Schmidt norms of `(E/E₁₁, E/E₂₂)`.
    pub fn norms(&self, e: &BlockProjection<T>) -> (T, T) {
        (
            hs_norm(&self.over_e11, e.h2(), e.h2()),
            hs_norm(&self.over_e22, e.h1(), e.h1()),
        )
    }
}

/// Both Schur complements of `E`. `E₁₁` must be invertible; a singular
/// `E₂₂` is pseudo-inverted, or rejected when `strict` is set.
pub fn schur_complements<T: Real>(e: &BlockProjection<T>, strict: bool) -> Result<SchurComplements<T>> {
    let (g1, g2) = (e.h1().gram(), e.h2().gram());
    let eig11 = sym_eigen(&e.e11, g1)?;
    let min11 = eig11.values.first().copied().unwrap_or(T::one());
    if min11 <= T::tol(BLOCK_RANK_TOL) * eig11.max_abs_value() {
        return Err(Error::SingularBlock {
            min_eigenvalue: min11.as_f64(),
        });
    }
    let e11_inv = eig11.apply_fn(|l| T::one() / l);
    let (e22_pinv, singular) = selfadjoint_pinv(&e.e22, g2, BLOCK_RANK_TOL)?;
    if singular && strict {
        let min22 = sym_eigen(&e.e22, g2)?.values.first().copied().unwrap_or(T::zero());
        return Err(Error::SingularBlock {
            min_eigenvalue: min22.as_f64(),
        });
    }
    Ok(SchurComplements {
        over_e11: &e.e22 - &e.e21.matmul(&e11_inv).matmul(&e.e12),
        over_e22: &e.e11 - &e.e12.matmul(&e22_pinv).matmul(&e.e21),
        e22_pseudo_inverse: singular,
    })
}

/// Structure of the closed span of a set of vectors in `H₁ ⊕ H₂`.
#[derive(Clone, Debug)]
pub struct GraphAnalysis<T> {
    pub projection: BlockProjection<T>,
    /// `ker(I − E₂₂) = 0`.
    pub closable: bool,
    /// `dim ker(I − E₂₂)`: vectors `(0; ψ)` inside the span.
    pub singular_dim: usize,
    /// Projection onto `ker(I − E₂₂)`.
    pub kernel_projection: DenseMatrix<T>,
    /// `Q`, the projection onto `ker(I − E₂₂)^⊥`.
    pub q_projection: DenseMatrix<T>,
    /// Operator with characteristic projection `[[E₁₁, E₁₂Q], [QE₂₁, E₂₂Q]]`,
    /// extended by zero off the range of `E₁₁`.
    pub closable_part: Option<OperatorBetween<T>>,
}

impl<T: Real> GraphAnalysis<T> {
    /// `[[E₁₁, E₁₂Q], [QE₂₁, E₂₂Q]]`.
    pub fn closable_projection(&self) -> BlockProjection<T> {
        let e = &self.projection;
        let q = &self.q_projection;
        BlockProjection {
            e11: e.e11.clone(),
            e12: e.e12.matmul(q),
            e21: q.matmul(&e.e21),
            e22: e.e22.matmul(q),
            ambient: e.ambient.clone(),
        }
    }
}

/// Projection onto the span of `generators` (columns in `ds` coordinates)
/// and its closability structure. With `demand_operator`, a span that is
/// not the graph of an operator is an error.
pub fn analyze_graph<T: Real>(
    ds: &DirectSum<T>,
    generators: &DenseMatrix<T>,
    demand_operator: bool,
) -> Result<GraphAnalysis<T>> {
    if generators.rows() != ds.dim() {
        return Err(Error::DimensionMismatch(format!(
            "generators have {} rows for a sum of dimension {}",
            generators.rows(),
            ds.dim()
        )));
    }
    let gram = ds.gram();
    for (j, c) in generators.columns().iter().enumerate() {
        if c.iter().all(|&x| x == T::zero()) {
            return Err(Error::InvalidInput(format!("generator column {j} is zero")));
        }
    }
    let q = orthonormalize(ds.dim(), &generators.columns(), &gram);
    let full = q.matmul(&q.transpose()).matmul(&gram);
    let projection = BlockProjection::from_full(&full, ds.clone());

    let h2 = &ds.second;
    let n2 = h2.dim();
    let i2 = DenseMatrix::identity(n2);
    let fixed = null_space(&(&i2 - &projection.e22), h2.gram())?;
    let singular_dim = fixed.cols();
    let kernel_projection = fixed.matmul(&fixed.transpose()).matmul(h2.gram());
    let q_projection = &i2 - &kernel_projection;
    if demand_operator && singular_dim > 0 {
        return Err(Error::NotAGraph { singular_dim });
    }

    // T_clo·E₁₁ = Q·E₂₁, solved on the range of E₁₁.
    let (e11_pinv, _) = selfadjoint_pinv(&projection.e11, ds.first.gram(), BLOCK_RANK_TOL)?;
    let t_clo = q_projection.matmul(&projection.e21).matmul(&e11_pinv);
    let closable_part = Some(OperatorBetween::new(t_clo, ds.first.clone(), ds.second.clone())?);

    Ok(GraphAnalysis {
        projection,
        closable: singular_dim == 0,
        singular_dim,
        kernel_projection,
        q_projection,
        closable_part,
    })
}

/// `(1/(n+1))·Σ_{k=0}^{n} E₂₂^k`, which tends to the projection onto
/// `ker(I − E₂₂)` as `n → ∞`.
pub fn cesaro_mean<T: Real>(e22: &DenseMatrix<T>, n: usize) -> DenseMatrix<T> {
    let dim = e22.rows();
    let mut power = DenseMatrix::identity(dim);
    let mut sum = DenseMatrix::identity(dim);
    for _ in 0..n {
        power = power.matmul(e22);
        sum = &sum + &power;
    }
    sum.scale(T::one() / T::lit((n + 1) as f64))
}
