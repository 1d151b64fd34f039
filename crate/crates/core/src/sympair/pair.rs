use crate::error::{Error, Result};
use crate::hilbert::{DirectSum, OperatorBetween};
use crate::linalg::{sym_eigen, DenseMatrix};
use crate::Real;

use super::DefectModel;

const PAIR_TOL: f64 = 1e-10;
const DEFECT_TOL: f64 = 1e-8;

/// `A: H₁ → H₂` and `B: H₂ → H₁` with `⟨Au, v⟩₂ = ⟨u, Bv⟩₁`.
#[derive(Clone, Debug)]
pub struct SymmetricPair<T> {
    a: OperatorBetween<T>,
    b: OperatorBetween<T>,
    residual: T,
}

impl<T: Real> SymmetricPair<T> {
    pub fn new(a: OperatorBetween<T>, b: OperatorBetween<T>) -> Result<Self> {
        if !a.domain().same_inner_product(b.codomain()) || !a.codomain().same_inner_product(b.domain()) {
            return Err(Error::DimensionMismatch(
                "A and B do not act between the same pair of spaces".into(),
            ));
        }
        let residual = pair_residual(&a, &b);
        if !(residual <= T::tol(PAIR_TOL)) {
            return Err(Error::PairIncompatible {
                residual: residual.as_f64(),
            });
        }
        Ok(Self { a, b, residual })
    }

    /// `(A, A*)`.
    pub fn from_a(a: OperatorBetween<T>) -> Result<Self> {
        let b = a.adjoint();
        Self::new(a, b)
    }

    pub fn a(&self) -> &OperatorBetween<T> {
        &self.a
    }

    pub fn b(&self) -> &OperatorBetween<T> {
        &self.b
    }

    /// `‖A − B*‖ / max(‖A‖, ‖B‖)`, Hilbert–Schmidt.
    pub fn residual(&self) -> T {
        self.residual
    }

    pub fn ambient(&self) -> DirectSum<T> {
        DirectSum::new(self.a.domain().clone(), self.a.codomain().clone())
    }
}

fn pair_residual<T: Real>(a: &OperatorBetween<T>, b: &OperatorBetween<T>) -> T {
    let b_star = b.adjoint();
    let diff = a.matrix() - b_star.matrix();
    let scale = a.hs_norm().max(b.hs_norm());
    let r = crate::hilbert::hs_norm(&diff, a.domain(), a.codomain());
    if scale == T::zero() {
        r
    } else {
        r / scale
    }
}

/// `L[x; y] = [By; Ax]` on `H₁ ⊕ H₂`.
#[derive(Clone, Debug)]
pub struct BlockOperator<T> {
    pub l: OperatorBetween<T>,
    pub ambient: DirectSum<T>,
    pub symmetry_residual: T,
}

pub fn build_l<T: Real>(pair: &SymmetricPair<T>) -> Result<BlockOperator<T>> {
    let ambient = pair.ambient();
    let (n1, n2) = (ambient.first.dim(), ambient.second.dim());
    let m = DenseMatrix::from_blocks(
        &DenseMatrix::zeros(n1, n1),
        pair.b().matrix(),
        pair.a().matrix(),
        &DenseMatrix::zeros(n2, n2),
    );
    let space = ambient.space();
    let l = OperatorBetween::new(m, space.clone(), space)?;
    let symmetry_residual = l.selfadjoint_residual();
    if !(symmetry_residual <= T::tol(PAIR_TOL)) {
        return Err(Error::PairIncompatible {
            residual: symmetry_residual.as_f64(),
        });
    }
    Ok(BlockOperator {
        l,
        ambient,
        symmetry_residual,
    })
}

/// Eigenvectors of `A*B*` for the eigenvalue `−1`.
#[derive(Clone, Debug)]
pub struct DefectSpace<T> {
    pub model: DefectModel<T>,
    /// `G₁`-orthonormal basis of the defect space, as columns.
    pub basis: DenseMatrix<T>,
    /// Spectrum of `A*B*`, ascending.
    pub eigenvalues: Vec<T>,
}

impl<T: Real> DefectSpace<T> {
    pub fn indices(&self) -> (usize, usize) {
        self.model.indices()
    }
}

pub fn defect_space<T: Real>(pair: &SymmetricPair<T>) -> Result<DefectSpace<T>> {
    let h1 = pair.a().domain();
    let n = h1.dim();
    // A*B* = BA for a compatible pair, selfadjoint on H₁; its G₁-symmetric part
    // absorbs the rounding left by the compatibility residual.
    let ab = pair.a().adjoint().compose(&pair.b().adjoint())?;
    let m = ab.matrix();
    let m_star = h1.gram_solve(&m.transpose().matmul(h1.gram()));
    let sym = (m + &m_star).scale(T::lit(0.5));
    let eig = sym_eigen(&sym, h1.gram())?;
    let scale = T::one().max(eig.max_abs_value());
    let keep: Vec<usize> = (0..n)
        .filter(|&i| (eig.values[i] + T::one()).abs() <= T::tol(DEFECT_TOL) * scale)
        .collect();
    let basis = eig.vectors.select_columns(&keep);
    let model = if keep.is_empty() {
        DefectModel::empty()
    } else {
        let g = h1.gram();
        let restrict = |op: &DenseMatrix<T>| basis.transpose().matmul(&g.matmul(&op.matmul(&basis)));
        let bb_star = pair.b().compose(&pair.b().adjoint())?;
        DefectModel::assembled(
            basis.transpose().matmul(&g.matmul(&basis)).symmetric_part(),
            restrict(bb_star.matrix()),
            restrict(m),
            T::zero(),
        )?
    };
    Ok(DefectSpace {
        model,
        basis,
        eigenvalues: eig.values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::WeightedSpace;

    type M = DenseMatrix<f64>;

    fn op(m: M, g1: &M, g2: &M) -> OperatorBetween<f64> {
        OperatorBetween::new(
            m,
            WeightedSpace::new(g1.clone(), "H1").unwrap(),
            WeightedSpace::new(g2.clone(), "H2").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_pair_gives_zero_l() {
        let i = M::identity(2);
        let pair = SymmetricPair::new(op(M::zeros(2, 2), &i, &i), op(M::zeros(2, 2), &i, &i)).unwrap();
        let l = build_l(&pair).unwrap();
        assert_eq!(l.l.matrix(), &M::zeros(4, 4));
        assert_eq!(l.symmetry_residual, 0.0);
    }

    #[test]
    fn identity_pair_swaps_blocks() {
        let i = M::identity(1);
        let pair = SymmetricPair::new(op(i.clone(), &i, &i), op(i.clone(), &i, &i)).unwrap();
        let l = build_l(&pair).unwrap();
        assert_eq!(l.l.matrix(), &M::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert_eq!(defect_space(&pair).unwrap().indices(), (0, 0));
    }

    #[test]
    fn incompatible_pair_is_rejected() {
        let i = M::identity(1);
        let err = SymmetricPair::new(op(i.clone(), &i, &i), op(i.scale(2.0), &i, &i)).unwrap_err();
        assert_eq!(err.name(), "PairIncompatible");
    }

    #[test]
    fn weighted_adjoint_pair() {
        let g1 = M::from_rows(&[&[2.0, 0.5], &[0.5, 1.0]]);
        let g2 = M::from_diag(&[3.0]);
        let pair = SymmetricPair::from_a(op(M::from_rows(&[&[1.0, -2.0]]), &g1, &g2)).unwrap();
        assert!(build_l(&pair).unwrap().symmetry_residual < 1e-14);
        let d = defect_space(&pair).unwrap();
        assert_eq!(d.indices(), (0, 0));
        assert!(d.eigenvalues.iter().all(|&l| l > -1e-12));
    }
}
