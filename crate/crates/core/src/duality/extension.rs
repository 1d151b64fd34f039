//! Semibounded operators `A ≥ 1`, their forms, and the Friedrichs and
//! Krein constructions.

use crate::error::{Error, Result};
use crate::hilbert::{hs_norm, OperatorBetween, WeightedSpace};
use crate::linalg::{rank, spd_inverse, sym_eigen, DenseMatrix};
use crate::Real;

const SEMIBOUNDED_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-9;

/// An operator on `H` known only on `𝒟 = span(basis)`: column `j` of
/// `images` is `A` applied to column `j` of `basis`.
#[derive(Clone, Debug)]
pub struct PartialOperator<T> {
    space: WeightedSpace<T>,
    basis: DenseMatrix<T>,
    images: DenseMatrix<T>,
}

impl<T: Real> PartialOperator<T> {
    pub fn new(space: WeightedSpace<T>, basis: DenseMatrix<T>, images: DenseMatrix<T>) -> Result<Self> {
        let n = space.dim();
        if basis.rows() != n || images.shape() != basis.shape() {
            return Err(Error::DimensionMismatch(format!(
                "domain basis {:?} and images {:?} in a space of dimension {n}",
                basis.shape(),
                images.shape()
            )));
        }
        if rank(&space.whiten(&basis), RANK_TOL)? != basis.cols() {
            return Err(Error::InvalidInput("domain basis is linearly dependent".into()));
        }
        Ok(Self { space, basis, images })
    }

    /// `A` on all of `H`.
    pub fn full(a: &OperatorBetween<T>) -> Result<Self> {
        Self::new(
            a.domain().clone(),
            DenseMatrix::identity(a.domain().dim()),
            a.matrix().clone(),
        )
    }

    /// `A` restricted to `span(basis)`.
    pub fn restrict(a: &OperatorBetween<T>, basis: DenseMatrix<T>) -> Result<Self> {
        let images = a.matrix().matmul(&basis);
        Self::new(a.domain().clone(), basis, images)
    }

    pub fn space(&self) -> &WeightedSpace<T> {
        &self.space
    }

    pub fn basis(&self) -> &DenseMatrix<T> {
        &self.basis
    }

    pub fn images(&self) -> &DenseMatrix<T> {
        &self.images
    }

    pub fn domain_dim(&self) -> usize {
        self.basis.cols()
    }

    /// `q(φ, ψ) = ⟨φ, Aψ⟩` on the domain, in basis coordinates.
    pub fn form(&self) -> Result<SemiboundedForm<T>> {
        let s = self.basis.transpose().matmul(self.space.gram()).matmul(&self.images);
        SemiboundedForm::new(self.space.clone(), self.basis.clone(), s)
    }
}

/// A symmetric form `q` on `span(domain)` with `q(φ, φ) ≥ ‖φ‖²`.
#[derive(Clone, Debug)]
pub struct SemiboundedForm<T> {
    space: WeightedSpace<T>,
    domain: DenseMatrix<T>,
    form_matrix: DenseMatrix<T>,
}

impl<T: Real> SemiboundedForm<T> {
    /// `form_matrix[i][j] = q(dᵢ, dⱼ)` for the columns `dᵢ` of `domain`.
    pub fn new(space: WeightedSpace<T>, domain: DenseMatrix<T>, form_matrix: DenseMatrix<T>) -> Result<Self> {
        let k = domain.cols();
        if domain.rows() != space.dim() || form_matrix.shape() != (k, k) {
            return Err(Error::DimensionMismatch("form matrix does not match its domain".into()));
        }
        let scale = form_matrix.frobenius_norm();
        let asym = form_matrix.asymmetry();
        if asym > T::tol(SEMIBOUNDED_TOL) * scale {
            return Err(Error::NotSelfadjoint {
                residual: (asym / scale).as_f64(),
            });
        }
        let form_matrix = form_matrix.symmetric_part();
        // q ≥ ‖·‖² ⟺ the pencil (S, BᵀGB) has spectrum in [1, ∞).
        let inner = domain.transpose().matmul(space.gram()).matmul(&domain);
        let pencil = spd_inverse(&inner)?.matmul(&form_matrix);
        let lowest = sym_eigen(&pencil, &inner)?.values.first().copied().unwrap_or(T::one());
        if lowest < T::one() - T::tol(SEMIBOUNDED_TOL) {
            return Err(Error::NotSemibounded {
                min_eigenvalue: (lowest - T::one()).as_f64(),
            });
        }
        Ok(Self {
            space,
            domain,
            form_matrix,
        })
    }

    /// A form defined on all of `H` in its own coordinates.
    pub fn on_whole_space(space: WeightedSpace<T>, form_matrix: DenseMatrix<T>) -> Result<Self> {
        let n = space.dim();
        Self::new(space, DenseMatrix::identity(n), form_matrix)
    }

    pub fn space(&self) -> &WeightedSpace<T> {
        &self.space
    }

    pub fn domain(&self) -> &DenseMatrix<T> {
        &self.domain
    }

    pub fn form_matrix(&self) -> &DenseMatrix<T> {
        &self.form_matrix
    }

    pub fn is_densely_defined(&self) -> bool {
        self.domain.cols() == self.space.dim()
    }
}

/// `JJ*` for the inclusion `J: H_A → H` and the operator it determines.
#[derive(Clone, Debug)]
pub struct FriedrichsExtension<T> {
    /// `JJ* = B·S⁻¹·BᵀG`, a positive contraction on `H`.
    pub jj_star: OperatorBetween<T>,
    /// `(JJ*)⁻¹` when the form is densely defined; otherwise the inverse of
    /// `JJ*` on its range, extended by zero.
    pub inverse: OperatorBetween<T>,
    /// `dim H ⊖ 𝒟`: directions outside the form domain, where the
    /// extension takes the value `+∞`.
    pub infinite_directions: usize,
    /// Operator norm of `JJ*`.
    pub jj_star_norm: T,
}

pub fn friedrichs_extension<T: Real>(q: &SemiboundedForm<T>) -> Result<FriedrichsExtension<T>> {
    let space = q.space();
    let b = q.domain();
    // ⟨h, Jg⟩ = ⟨J*h, g⟩_A gives J*h = S⁻¹·BᵀG·h in domain coordinates.
    let j_star = spd_inverse(q.form_matrix())?
        .matmul(&b.transpose())
        .matmul(space.gram());
    let jj = b.matmul(&j_star);
    let jj_star = OperatorBetween::new(gram_symmetric_part(&jj, space), space.clone(), space.clone())?;
    let eig = sym_eigen(jj_star.matrix(), space.gram())?;
    let cut = T::tol(RANK_TOL) * eig.max_abs_value();
    let inverse = eig.apply_fn(|l| if l > cut { T::one() / l } else { T::zero() });
    let jj_star_norm = eig.max_abs_value();
    Ok(FriedrichsExtension {
        jj_star,
        inverse: OperatorBetween::new(inverse, space.clone(), space.clone())?,
        infinite_directions: space.dim() - b.cols(),
        jj_star_norm,
    })
}

/// `(M + M*) / 2` for the space's inner product.
fn gram_symmetric_part<T: Real>(m: &DenseMatrix<T>, space: &WeightedSpace<T>) -> DenseMatrix<T> {
    let star = space.gram_solve(&m.transpose().matmul(space.gram()));
    (m + &star).scale(T::lit(0.5))
}

/// `max ‖JJ*·Aφ − φ‖ / ‖φ‖` over the domain basis, i.e. `(JJ*)⁻¹ ⊇ A`.
pub fn friedrichs_reproduction_residual<T: Real>(a: &PartialOperator<T>, ext: &FriedrichsExtension<T>) -> T {
    let space = a.space();
    let mut worst = T::zero();
    for j in 0..a.domain_dim() {
        let phi = a.basis().column(j);
        let back = ext.jj_star.apply(&a.images().column(j));
        let diff: Vec<T> = back.iter().zip(&phi).map(|(&x, &y)| x - y).collect();
        worst = worst.max(space.norm(&diff) / space.norm(&phi));
    }
    worst
}

#[derive(Clone, Debug)]
pub struct KreinReport<T> {
    /// `‖B − B*‖`, Hilbert–Schmidt.
    pub selfadjoint_residual: T,
    pub norm: T,
    /// `max ‖BAφ − φ‖ / ‖φ‖` over the domain basis.
    pub inverse_residual: T,
    pub member: bool,
    pub reasons: Vec<String>,
}

/// Whether `B` lies in the Krein set of `A`: `B* = B`, `‖B‖ ≤ 1` and `BAφ = φ` on the domain.
pub fn krein_membership<T: Real>(a: &PartialOperator<T>, b: &OperatorBetween<T>) -> Result<KreinReport<T>> {
    let space = a.space();
    if b.domain().dim() != space.dim() || b.codomain().dim() != space.dim() {
        return Err(Error::DimensionMismatch("B must act on the space of A".into()));
    }
    let b = OperatorBetween::new(b.matrix().clone(), space.clone(), space.clone())?;
    let selfadjoint_residual = hs_norm(&(b.matrix() - b.adjoint().matrix()), space, space);
    let norm = b.norm()?;
    let mut inverse_residual = T::zero();
    for j in 0..a.domain_dim() {
        let phi = a.basis().column(j);
        let back = b.apply(&a.images().column(j));
        let diff: Vec<T> = back.iter().zip(&phi).map(|(&x, &y)| x - y).collect();
        inverse_residual = inverse_residual.max(space.norm(&diff) / space.norm(&phi));
    }
    let mut reasons = Vec::new();
    let scale = norm.max(T::one());
    if selfadjoint_residual > T::tol(1e-10) * scale {
        reasons.push(format!("not selfadjoint (residual {selfadjoint_residual:e})"));
    }
    if norm > T::one() + T::tol(1e-10) {
        reasons.push(format!("not contractive (norm {norm})"));
    }
    if inverse_residual > T::tol(1e-9) {
        reasons.push(format!(
            "does not invert A on its domain (residual {inverse_residual:e})"
        ));
    }
    Ok(KreinReport {
        selfadjoint_residual,
        norm,
        inverse_residual,
        member: reasons.is_empty(),
        reasons,
    })
}

/// `q(φ, ψ) = ⟨A^{1/2}φ, A^{1/2}ψ⟩` for selfadjoint `A ≥ 1`.
pub fn form_of_operator<T: Real>(a: &OperatorBetween<T>) -> Result<SemiboundedForm<T>> {
    let space = a.domain();
    let eig = sym_eigen(a.matrix(), space.gram())?;
    let lowest = eig.values.first().copied().unwrap_or(T::one());
    if lowest < T::one() - T::tol(SEMIBOUNDED_TOL) {
        return Err(Error::NotSemibounded {
            min_eigenvalue: (lowest - T::one()).as_f64(),
        });
    }
    let root = eig.apply_fn(|l| l.sqrt());
    let q = root.transpose().matmul(space.gram()).matmul(&root);
    SemiboundedForm::on_whole_space(space.clone(), q)
}

/// `A = (JJ*)⁻¹` for a densely defined closed form.
pub fn operator_of_form<T: Real>(q: &SemiboundedForm<T>) -> Result<OperatorBetween<T>> {
    if !q.is_densely_defined() {
        return Err(Error::InvalidInput("form is not densely defined".into()));
    }
    Ok(friedrichs_extension(q)?.inverse)
}

/// Round trip `A → q → (JJ*)⁻¹`, returning the form and `‖A − (JJ*)⁻¹‖ / ‖A‖`.
pub fn form_correspondence<T: Real>(a: &OperatorBetween<T>) -> Result<(SemiboundedForm<T>, T)> {
    let q = form_of_operator(a)?;
    let back = operator_of_form(&q)?;
    let residual = hs_norm(&(a.matrix() - back.matrix()), a.domain(), a.domain()) / a.hs_norm();
    Ok((q, residual))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangeDensity {
    pub rank: usize,
    pub dim: usize,
}

impl RangeDensity {
    /// `A𝒟` spans `H`, the finite stand-in for essential selfadjointness.
    pub fn dense(&self) -> bool {
        self.rank == self.dim
    }
}

pub fn essential_selfadjointness_probe<T: Real>(a: &PartialOperator<T>) -> Result<RangeDensity> {
    Ok(RangeDensity {
        rank: rank(&a.space().whiten(a.images()), RANK_TOL)?,
        dim: a.space().dim(),
    })
}
