use crate::error::{Error, Result};
use crate::hilbert::{hs_norm, CommonDomain, OperatorBetween};
use crate::linalg::{kernel, orthonormalize, sym_eigen, DenseMatrix, EigenDecomposition};
use crate::Real;

const RANK_TOL: f64 = 1e-9;

/// `Δ = J*J` on `H₁`, where `J` is the inclusion of the common domain.
///
/// `⟨φ, Δφ⟩₁ = ‖φ‖₂²` for every `φ ∈ 𝒟`.
pub fn duality_operator<T: Real>(cd: &CommonDomain<T>) -> Result<OperatorBetween<T>> {
    let j = cd.inclusion()?;
    j.adjoint().compose(&j)
}

/// `|⟨φ, Δφ⟩₁ − ‖φ‖₂²| / (‖Δ‖·‖φ‖₁²)` for `φ = basis·c`; absolute when that scale is zero.
///
/// The scale bounds both sides, so the residual stays meaningful when `φ` is
/// close to `ker Δ` and `‖φ‖₂²` itself is at rounding level.
pub fn quadratic_form_residual<T: Real>(cd: &CommonDomain<T>, delta: &OperatorBetween<T>, coeffs: &[T]) -> T {
    let phi1 = cd.image1().matvec(coeffs);
    let phi2 = cd.image2().matvec(coeffs);
    let lhs = cd.h1().inner(&phi1, &delta.apply(&phi1));
    let rhs = cd.h2().inner(&phi2, &phi2);
    let diff = (lhs - rhs).abs();
    let scale = delta.norm().unwrap_or(T::zero()) * cd.h1().inner(&phi1, &phi1);
    if scale > T::zero() {
        diff / scale
    } else {
        diff
    }
}

/// Spectral decomposition of a positive operator on its own space.
pub(crate) fn positive_eigen<T: Real>(delta: &OperatorBetween<T>) -> Result<EigenDecomposition<T>> {
    let mut eig = sym_eigen(delta.matrix(), delta.domain().gram())?;
    let scale = eig.max_abs_value();
    for l in &mut eig.values {
        if *l < T::zero() {
            if -*l > T::tol(RANK_TOL) * scale {
                return Err(Error::InvalidInput(format!("operator has negative eigenvalue {}", l)));
            }
            *l = T::zero();
        }
    }
    Ok(eig)
}

/// `K = J·Δ^{-1/2}` on `ran Δ^{1/2}`, zero on its complement.
#[derive(Clone, Debug)]
pub struct PartialIsometry<T> {
    pub k: OperatorBetween<T>,
    /// `‖(K*K)² − K*K‖`, Hilbert–Schmidt on `H₁`.
    pub projection_residual: T,
    /// Largest relative defect of `⟨Kφ, JJ*Kφ⟩₂ = ‖φ‖₂²` over the domain basis.
    pub m1_residual: T,
}

pub fn partial_isometry_k<T: Real>(cd: &CommonDomain<T>) -> Result<PartialIsometry<T>> {
    let j = cd.inclusion()?;
    let j_star = j.adjoint();
    let delta = j_star.compose(&j)?;
    let eig = positive_eigen(&delta)?;
    let cut = T::tol(RANK_TOL) * eig.max_abs_value();
    let inv_sqrt = eig.apply_fn(|l| if l > cut { T::one() / l.sqrt() } else { T::zero() });
    let k = OperatorBetween::new(j.matrix().matmul(&inv_sqrt), cd.h1().clone(), cd.h2().clone())?;

    let kk = k.adjoint().compose(&k)?;
    let projection_residual = hs_norm(&(&kk.matrix().matmul(kk.matrix()) - kk.matrix()), cd.h1(), cd.h1());

    let delta2 = j.compose(&j_star)?;
    let mut m1_residual = T::zero();
    let x1 = cd.image1();
    let x2 = cd.image2();
    for c in 0..x1.cols() {
        let phi = x1.column(c);
        let k_phi = k.apply(&phi);
        let lhs = cd.h2().inner(&k_phi, &delta2.apply(&k_phi));
        let rhs = cd.h2().norm(&x2.column(c)).powi(2);
        let diff = (lhs - rhs).abs();
        m1_residual = m1_residual.max(if rhs > T::zero() { diff / rhs } else { diff });
    }
    Ok(PartialIsometry {
        k,
        projection_residual,
        m1_residual,
    })
}

/// `Û` on `H₂` with `⟨Ûφ, ψ⟩₂ = ⟨ΔUφ, ψ⟩₁` on the domain and `Û = 0` on `ker J*`.
#[derive(Clone, Debug)]
pub struct Reflection<T> {
    pub u_hat: OperatorBetween<T>,
    /// `‖Û − Û*‖` for the `H₂` inner product, Hilbert–Schmidt.
    pub selfadjoint_residual: T,
    /// Operator norm of `Û` on `H₂`.
    pub norm: T,
}

/// Builds `Û = J·U·Δ⁺·J*` for `U` unitary on `H₁` with `ΔU = U*Δ`.
///
/// The intertwining residual is measured as `‖ΔU − U*Δ‖ / ‖Δ‖` against
/// `intertwining_tol`; unitarity as `‖U*U − I‖` against `1e-10`.
pub fn reflection_hat<T: Real>(
    cd: &CommonDomain<T>,
    u: &OperatorBetween<T>,
    intertwining_tol: f64,
) -> Result<Reflection<T>> {
    let h1 = cd.h1();
    if u.domain().dim() != h1.dim() || u.codomain().dim() != h1.dim() {
        return Err(Error::DimensionMismatch("U must act on the first space".into()));
    }
    let u = OperatorBetween::new(u.matrix().clone(), h1.clone(), h1.clone())?;
    let u_star = u.adjoint();
    let id = DenseMatrix::identity(h1.dim());
    let unitary = hs_norm(&(&u_star.matrix().matmul(u.matrix()) - &id), h1, h1);
    if unitary > T::tol(1e-10) {
        return Err(Error::NotUnitary {
            residual: unitary.as_f64(),
        });
    }

    let j = cd.inclusion()?;
    let j_star = j.adjoint();
    let delta = j_star.compose(&j)?;
    let delta_norm = delta.hs_norm();
    let twist = &delta.matrix().matmul(u.matrix()) - &u_star.matrix().matmul(delta.matrix());
    let twist = if delta_norm > T::zero() {
        hs_norm(&twist, h1, h1) / delta_norm
    } else {
        T::zero()
    };
    if twist > T::tol(intertwining_tol) {
        return Err(Error::NotIntertwining {
            residual: twist.as_f64(),
        });
    }

    let eig = positive_eigen(&delta)?;
    let cut = T::tol(RANK_TOL) * eig.max_abs_value();
    let delta_pinv = eig.apply_fn(|l| if l > cut { T::one() / l } else { T::zero() });
    let m = j
        .matrix()
        .matmul(u.matrix())
        .matmul(&delta_pinv)
        .matmul(j_star.matrix());
    let u_hat = OperatorBetween::new(m, cd.h2().clone(), cd.h2().clone())?;
    let u_hat_star = u_hat.adjoint();
    let selfadjoint_residual = hs_norm(&(u_hat.matrix() - u_hat_star.matrix()), cd.h2(), cd.h2());
    let norm = u_hat.norm()?;
    Ok(Reflection {
        u_hat,
        selfadjoint_residual,
        norm,
    })
}

/// Basis of `ker J*` in `H₂`, orthonormal for `⟨·,·⟩₂`.
pub fn ker_j_star<T: Real>(cd: &CommonDomain<T>) -> Result<DenseMatrix<T>> {
    let j_star = cd.inclusion()?.adjoint();
    let h2 = cd.h2();
    // J*h = 0 ⟺ (L₁ᵀ J*) h = 0; change to coordinates where H₂ is Euclidean.
    let whitened = cd.h1().whiten(j_star.matrix());
    let l2_inv_t = crate::linalg::lower_transpose_solve(h2.cholesky(), &DenseMatrix::identity(h2.dim()));
    let k = kernel(&whitened.matmul(&l2_inv_t), RANK_TOL, T::zero())?;
    Ok(l2_inv_t.matmul(&k))
}

/// `‖P_{ker J*} − P_{H₂ ⊖ 𝒟}‖`, comparing the two subspaces through their
/// `G₂`-orthogonal projections.
pub fn kernel_complement_residual<T: Real>(cd: &CommonDomain<T>) -> Result<T> {
    let h2 = cd.h2();
    let n2 = h2.dim();
    let ker = ker_j_star(cd)?;
    let image = orthonormalize(n2, &cd.image2().columns(), h2.gram());
    let p_image = image.matmul(&image.transpose()).matmul(h2.gram());
    let p_complement = &DenseMatrix::identity(n2) - &p_image;
    let p_ker = ker.matmul(&ker.transpose()).matmul(h2.gram());
    Ok(hs_norm(&(&p_ker - &p_complement), h2, h2))
}

/// `[image1; image2]`: the graph of the inclusion, spanned by the domain basis.
pub fn inclusion_graph<T: Real>(cd: &CommonDomain<T>) -> DenseMatrix<T> {
    cd.image1().vstack(&cd.image2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::WeightedSpace;

    type M = DenseMatrix<f64>;

    fn space(g: M) -> WeightedSpace<f64> {
        WeightedSpace::new(g, "h").unwrap()
    }

    #[test]
    fn equal_spaces_give_identity() {
        let g = M::from_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let cd = CommonDomain::same_coordinates(space(g.clone()), space(g)).unwrap();
        let delta = duality_operator(&cd).unwrap();
        assert!((delta.matrix() - &M::identity(2)).max_abs() < 1e-14);
        let k = partial_isometry_k(&cd).unwrap();
        assert!((k.k.matrix() - &M::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn discrete_radon_nikodym() {
        let cd = CommonDomain::same_coordinates(space(M::identity(2)), space(M::from_diag(&[2.0, 3.0]))).unwrap();
        let delta = duality_operator(&cd).unwrap();
        assert_eq!(delta.matrix(), &M::from_diag(&[2.0, 3.0]));
        let k = partial_isometry_k(&cd).unwrap();
        let expected = M::from_diag(&[0.5f64.sqrt(), (1.0f64 / 3.0).sqrt()]);
        assert!((k.k.matrix() - &expected).max_abs() < 1e-15);
        assert!(k.projection_residual < 1e-14 && k.m1_residual < 1e-14);
    }

    #[test]
    fn reflection_examples() {
        let cd = CommonDomain::same_coordinates(space(M::identity(2)), space(M::from_diag(&[2.0, 2.0]))).unwrap();
        let h1 = cd.h1().clone();
        let id = OperatorBetween::identity(&h1);
        let r = reflection_hat(&cd, &id, 1e-10).unwrap();
        assert!((r.u_hat.matrix() - &M::identity(2)).max_abs() < 1e-15);

        let minus = OperatorBetween::new(M::identity(2).scale(-1.0), h1.clone(), h1.clone()).unwrap();
        let r = reflection_hat(&cd, &minus, 1e-10).unwrap();
        assert!((r.u_hat.matrix() + &M::identity(2)).max_abs() < 1e-15);

        let swap = OperatorBetween::new(M::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), h1.clone(), h1.clone()).unwrap();
        let r = reflection_hat(&cd, &swap, 1e-10).unwrap();
        assert!((r.u_hat.matrix() - swap.matrix()).max_abs() < 1e-15);
        assert!((r.norm - 1.0).abs() < 1e-12 && r.selfadjoint_residual < 1e-15);

        let not_unitary = OperatorBetween::new(M::identity(2).scale(2.0), h1.clone(), h1).unwrap();
        assert!(matches!(
            reflection_hat(&cd, &not_unitary, 1e-10),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn non_intertwining_rejected() {
        let cd = CommonDomain::same_coordinates(space(M::identity(2)), space(M::from_diag(&[1.0, 4.0]))).unwrap();
        let h1 = cd.h1().clone();
        let swap = OperatorBetween::new(M::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), h1.clone(), h1).unwrap();
        assert!(matches!(
            reflection_hat(&cd, &swap, 1e-10),
            Err(Error::NotIntertwining { .. })
        ));
    }

    #[test]
    fn kernel_of_adjoint_is_complement_of_image() {
        // 𝒟 = one coordinate line of a 1-dim H₁ sitting inside a 2-dim H₂.
        let ambient = WeightedSpace::<f64>::euclidean(1, "ambient");
        let e1 = OperatorBetween::new(M::identity(1), ambient.clone(), space(M::identity(1))).unwrap();
        let e2 = OperatorBetween::new(
            M::from_rows(&[&[1.0], &[1.0]]),
            ambient,
            space(M::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]])),
        )
        .unwrap();
        let cd = CommonDomain::new(M::identity(1), e1, e2).unwrap();
        assert_eq!(ker_j_star(&cd).unwrap().cols(), 1);
        assert!(kernel_complement_residual(&cd).unwrap() < 1e-14);
    }
}
