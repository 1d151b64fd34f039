use crate::error::{Error, Result};
use crate::hilbert::WeightedSpace;
use crate::linalg::{sym_eigen, DenseMatrix};
use crate::Real;

/// Coordinates on `N₋₁(A*B*)` together with the operators the extension
/// theory needs there.
///
/// A defect vector `h = Σ cₖhₖ` is stored by its coefficients `c`. The
/// second component of a vector of `H₁ ⊕ H₂` that lies in the range of
/// `B*` on the defect span is stored as `d`, meaning `B*(Σ dₖhₖ)`. Its
/// `H₂` norm is `⟨h, BB*h⟩₁`, so the second block carries the Gram matrix
/// `G·BB*`.
#[derive(Clone, Debug)]
pub struct DefectModel<T> {
    pub dim: usize,
    pub gram: DenseMatrix<T>,
    pub bb_star_action: DenseMatrix<T>,
    /// `A*B*` on the span; `−I` unless assembled from samples.
    pub ab_star_action: DenseMatrix<T>,
    /// Discretization error scale of the assembled actions, zero for exact models.
    pub tolerance: T,
}

impl<T: Real> DefectModel<T> {
    /// A model with `A*B* = −I` exactly.
    pub fn new(gram: DenseMatrix<T>, bb_star_action: DenseMatrix<T>) -> Result<Self> {
        let n = gram.rows();
        Self::assembled(
            gram,
            bb_star_action,
            DenseMatrix::identity(n).scale(-T::one()),
            T::zero(),
        )
    }

    pub fn assembled(
        gram: DenseMatrix<T>,
        bb_star_action: DenseMatrix<T>,
        ab_star_action: DenseMatrix<T>,
        tolerance: T,
    ) -> Result<Self> {
        let dim = gram.rows();
        if bb_star_action.shape() != (dim, dim) || ab_star_action.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "defect model of dimension {dim} with mismatched actions"
            )));
        }
        let model = Self {
            dim,
            gram,
            bb_star_action,
            ab_star_action,
            tolerance,
        };
        if dim > 0 {
            let space = model.space()?;
            let shifted = &DenseMatrix::identity(dim) + &model.bb_star_action;
            let eig = sym_eigen(&shifted, space.gram())?;
            let min = eig.values.first().copied().unwrap_or(T::zero());
            if min < -T::tol(1e-10) * eig.max_abs_value() {
                return Err(Error::NotSemibounded {
                    min_eigenvalue: min.as_f64(),
                });
            }
        }
        Ok(model)
    }

    pub fn empty() -> Self {
        Self {
            dim: 0,
            gram: DenseMatrix::zeros(0, 0),
            bb_star_action: DenseMatrix::zeros(0, 0),
            ab_star_action: DenseMatrix::zeros(0, 0),
            tolerance: T::zero(),
        }
    }

    /// The defect span with the inner product of `H₁`.
    pub fn space(&self) -> Result<WeightedSpace<T>> {
        WeightedSpace::new(self.gram.clone(), "N(-1)")
    }

    /// `G·BB*`: the `H₂` inner product of `B*`-images.
    pub fn second_gram(&self) -> DenseMatrix<T> {
        self.gram.matmul(&self.bb_star_action).symmetric_part()
    }

    /// Gram matrix of `H₁ ⊕ H₂` restricted to the model, in `(c, d)` coordinates.
    pub fn k_gram(&self) -> DenseMatrix<T> {
        DenseMatrix::block_diag(&self.gram, &self.second_gram())
    }

    /// `L*[c; d] = [A*B*d; c]` in `(c, d)` coordinates.
    pub fn l_star(&self) -> DenseMatrix<T> {
        let n = self.dim;
        DenseMatrix::from_blocks(
            &DenseMatrix::zeros(n, n),
            &self.ab_star_action,
            &DenseMatrix::identity(n),
            &DenseMatrix::zeros(n, n),
        )
    }

    /// Deficiency indices `(d₊, d₋)`.
    pub fn indices(&self) -> (usize, usize) {
        (self.dim, self.dim)
    }

    /// `I + BB*`.
    pub fn shifted_bb_star(&self) -> DenseMatrix<T> {
        &DenseMatrix::identity(self.dim) + &self.bb_star_action
    }
}
