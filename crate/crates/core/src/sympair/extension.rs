//! Deficiency spaces of `L` and its selfadjoint extensions `L_Q`.

use crate::error::{Error, Result};
use crate::hilbert::hs_norm;
use crate::linalg::{rank, singular_values, sym_eigen, DenseMatrix};
use crate::Real;

use super::complex::realify;
use super::{ComplexVector2, DefectModel, SymmetricPair};

const Q_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-9;

/// `φ(h) = [h; iB*h]` onto `N₋ᵢ(L*)` and `ψ(h) = [h; −iB*h]` onto `Nᵢ(L*)`,
/// in the `(c, d)` coordinates of [`DefectModel`].
#[derive(Clone, Debug)]
pub struct DeficiencyIsomorphisms<T> {
    pub model: DefectModel<T>,
    /// Largest `‖L*φ(h) + iφ(h)‖ / ‖φ(h)‖` over the basis.
    pub phi_residual: T,
    /// Largest `‖L*ψ(h) − iψ(h)‖ / ‖ψ(h)‖` over the basis.
    pub psi_residual: T,
    pub phi_rank: usize,
    pub psi_rank: usize,
}

impl<T: Real> DeficiencyIsomorphisms<T> {
    pub fn phi(&self, h: &ComplexVector2<T>) -> ComplexVector2<T> {
        h.concat(&h.times_i())
    }

    pub fn psi(&self, h: &ComplexVector2<T>) -> ComplexVector2<T> {
        h.concat(&h.times_i().scale(-T::one()))
    }

    pub fn l_star(&self, v: &ComplexVector2<T>) -> ComplexVector2<T> {
        v.apply(&self.model.l_star())
    }

    pub fn injective(&self) -> bool {
        self.phi_rank == self.model.dim && self.psi_rank == self.model.dim
    }

    /// `(dim Nᵢ, dim N₋ᵢ)`.
    pub fn indices(&self) -> (usize, usize) {
        (self.psi_rank, self.phi_rank)
    }
}

pub fn deficiency_isomorphisms<T: Real>(model: &DefectModel<T>) -> Result<DeficiencyIsomorphisms<T>> {
    let n = model.dim;
    let mut iso = DeficiencyIsomorphisms {
        model: model.clone(),
        phi_residual: T::zero(),
        psi_residual: T::zero(),
        phi_rank: 0,
        psi_rank: 0,
    };
    if n == 0 {
        return Ok(iso);
    }
    let k = model.k_gram();
    let l_star = model.l_star();
    let eigen_residual = |v: &ComplexVector2<T>, lambda_im: T| {
        let r = v.apply(&l_star).sub(&v.times_i().scale(lambda_im));
        (r.norm_sq(&k) / v.norm_sq(&k)).sqrt()
    };
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::one();
        let h = ComplexVector2::real(e);
        let (phi, psi) = (iso.phi(&h), iso.psi(&h));
        iso.phi_residual = iso.phi_residual.max(eigen_residual(&phi, -T::one()));
        iso.psi_residual = iso.psi_residual.max(eigen_residual(&psi, T::one()));
    }
    let top = DenseMatrix::identity(n).vstack(&DenseMatrix::zeros(n, n));
    let bottom = DenseMatrix::zeros(n, n).vstack(&DenseMatrix::identity(n));
    // complex rank = half the rank of the real representation
    iso.phi_rank = rank(&realify(&top, &bottom), RANK_TOL)? / 2;
    iso.psi_rank = rank(&realify(&top, &bottom.scale(-T::one())), RANK_TOL)? / 2;
    Ok(iso)
}

/// Outcome of testing `I + BB* = Q*(I + BB*)Q` on the defect span.
#[derive(Clone, Debug, PartialEq)]
pub struct QCondition<T> {
    /// Hilbert–Schmidt norm of `(I + BB*) − Q*(I + BB*)Q`.
    pub residual: T,
    /// Largest `|‖u‖² + ‖B*u‖² − ‖Qu‖² − ‖B*Qu‖²|` over the basis.
    pub norm_residual: T,
    pub pass: bool,
}

pub fn q_condition_check<T: Real>(model: &DefectModel<T>, q: &DenseMatrix<T>) -> Result<QCondition<T>> {
    let n = model.dim;
    if q.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "Q is {}x{}, defect space has dimension {n}",
            q.rows(),
            q.cols()
        )));
    }
    if n == 0 {
        return Ok(QCondition {
            residual: T::zero(),
            norm_residual: T::zero(),
            pass: true,
        });
    }
    let space = model.space()?;
    let m = model.shifted_bb_star();
    let gm = space.gram().matmul(&m);
    let q_star_m_q = space.gram_solve(&q.transpose().matmul(&gm.matmul(q)));
    let residual = hs_norm(&(&m - &q_star_m_q), &space, &space);
    let norm_residual = (0..n)
        .map(|j| {
            let u = q.column(j);
            (gm[(j, j)] - crate::linalg::vector::gram_inner(&gm, &u, &u)).abs()
        })
        .fold(T::zero(), T::max);
    Ok(QCondition {
        residual,
        norm_residual,
        pass: residual <= T::tol(Q_TOL),
    })
}

/// `[x; y] + [u; −iB*u] + [v; iB*v]` with `v = Qu`.
#[derive(Clone, Debug)]
pub struct DomainElement<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub u: ComplexVector2<T>,
    pub v: ComplexVector2<T>,
}

impl<T: Real> DomainElement<T> {
    pub fn regular(x: Vec<T>, y: Vec<T>, defect_dim: usize) -> Self {
        Self {
            x,
            y,
            u: ComplexVector2::zeros(defect_dim),
            v: ComplexVector2::zeros(defect_dim),
        }
    }

    /// `u` real, `v = Qu`.
    pub fn with_defect(x: Vec<T>, y: Vec<T>, u: &[T], q: &DenseMatrix<T>) -> Self {
        let u = ComplexVector2::real(u.to_vec());
        let v = u.apply(q);
        Self { x, y, u, v }
    }
}

/// `L_Q` applied to a domain element.
#[derive(Clone, Debug)]
pub struct ExtensionAction<T> {
    /// `[By; Ax]`.
    pub regular: Vec<T>,
    /// `[iu − iv; u + v]` in `(c, d)` coordinates, i.e. `iu − iv` in `H₁` and
    /// `B*u + B*v` in `H₂`.
    pub defect: ComplexVector2<T>,
    /// `(1/2i)(⟨f, L*f⟩ − ⟨L*f, f⟩)`, with `L*` taken from the model.
    pub boundary_form: T,
    /// `‖ψ₊‖² − ‖ψ₋‖²`.
    pub defect_balance: T,
}

pub fn extension_action<T: Real>(
    pair: &SymmetricPair<T>,
    model: &DefectModel<T>,
    q: &DenseMatrix<T>,
    element: &DomainElement<T>,
) -> Result<ExtensionAction<T>> {
    let (n1, n2, n) = (pair.a().domain().dim(), pair.a().codomain().dim(), model.dim);
    if element.x.len() != n1 || element.y.len() != n2 || element.u.dim() != n || element.v.dim() != n {
        return Err(Error::DimensionMismatch(
            "domain element does not match the pair and defect model".into(),
        ));
    }
    let check = q_condition_check(model, q)?;
    if !check.pass {
        return Err(Error::QNotAdmissible {
            residual: check.residual.as_f64(),
        });
    }
    if n > 0 {
        let mismatch = element.v.sub(&element.u.apply(q)).norm_sq(&model.gram).sqrt();
        let scale = T::one().max(element.u.norm_sq(&model.gram).sqrt());
        if !(mismatch <= T::tol(Q_TOL) * scale) {
            return Err(Error::DecompositionMismatch {
                residual: (mismatch / scale).as_f64(),
            });
        }
    }

    let regular = pair
        .b()
        .apply(&element.y)
        .into_iter()
        .chain(pair.a().apply(&element.x))
        .collect();
    let (u, v) = (&element.u, &element.v);
    let defect = u.times_i().sub(&v.times_i()).concat(&u.add(v));

    let psi_plus = u.concat(&u.times_i().scale(-T::one()));
    let psi_minus = v.concat(&v.times_i());
    let (boundary_form, defect_balance) = if n == 0 {
        (T::zero(), T::zero())
    } else {
        let k = model.k_gram();
        let f = psi_plus.add(&psi_minus);
        let l_star_f = f.apply(&model.l_star());
        let (_, im) = f.inner(&l_star_f, &k);
        (im, psi_plus.norm_sq(&k) - psi_minus.norm_sq(&k))
    };
    Ok(ExtensionAction {
        regular,
        defect,
        boundary_form,
        defect_balance,
    })
}

/// The four blocks of a partial isometry on `H₁ ⊕ H₂`, in defect coordinates.
#[derive(Clone, Debug)]
pub struct CBlocks<T> {
    pub c11: DenseMatrix<T>,
    pub c12: DenseMatrix<T>,
    pub c21: DenseMatrix<T>,
    pub c22: DenseMatrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CBlockReport<T> {
    /// `‖C₂₂C₁₂⁻¹(C₁₁ − Q) + C₁₂⁻¹(C₁₁ − Q)Q − C₂₁‖`, Hilbert–Schmidt in the defect Gram.
    pub residual: T,
    /// `C₁₂` was singular and its pseudo-inverse was used.
    pub c12_singular: bool,
}

pub fn c_block_relation_check<T: Real>(
    model: &DefectModel<T>,
    q: &DenseMatrix<T>,
    c: &CBlocks<T>,
    strict: bool,
) -> Result<CBlockReport<T>> {
    let n = model.dim;
    let shapes = [q.shape(), c.c11.shape(), c.c12.shape(), c.c21.shape(), c.c22.shape()];
    if shapes.iter().any(|&s| s != (n, n)) {
        return Err(Error::DimensionMismatch(format!("C blocks and Q must all be {n}x{n}")));
    }
    if n == 0 {
        return Ok(CBlockReport {
            residual: T::zero(),
            c12_singular: false,
        });
    }
    let (c12_inv, singular) = pseudo_inverse(&c.c12)?;
    if singular && strict {
        return Err(Error::SingularC12);
    }
    let x = c12_inv.matmul(&(&c.c11 - q));
    let r = &(&c.c22.matmul(&x) + &x.matmul(q)) - &c.c21;
    let space = model.space()?;
    Ok(CBlockReport {
        residual: hs_norm(&r, &space, &space),
        c12_singular: singular,
    })
}

/// Moore–Penrose inverse of a square matrix via `(MᵀM)⁺Mᵀ`, cutting
/// singular values below `1e-9·σ_max`.
fn pseudo_inverse<T: Real>(m: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, bool)> {
    let n = m.rows();
    let smax = singular_values(m)?.first().copied().unwrap_or(T::zero());
    let cut = T::tol(RANK_TOL) * smax;
    let eig = sym_eigen(&m.transpose().matmul(m), &DenseMatrix::identity(n))?;
    let singular = eig.values.iter().any(|&l| l.max(T::zero()).sqrt() <= cut);
    let mtm_pinv = eig.apply_fn(|l| {
        if l.max(T::zero()).sqrt() <= cut {
            T::zero()
        } else {
            T::one() / l
        }
    });
    Ok((mtm_pinv.matmul(&m.transpose()), singular))
}
