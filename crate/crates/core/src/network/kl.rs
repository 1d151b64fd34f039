//! The operators `K: l²(V) → H_E` and `L: H_E → l²(V)` and what the
//! general theory says about them.

use crate::duality::{duality_operator, spectral_measure};
use crate::error::Result;
use crate::hilbert::{hs_norm, CommonDomain, OperatorBetween, WeightedSpace};
use crate::linalg::{null_space, DenseMatrix};
use crate::sympair::{build_l, defect_space, SymmetricPair};
use crate::Real;

use super::{EnergySpace, Network};

/// `Kδ_x = δ_x` and `Lv_x = δ_x − δ_o`, with `H_E` in pinned coordinates.
#[derive(Clone, Debug)]
pub struct KlPair<T = f64> {
    pub pair: SymmetricPair<T>,
    pub energy: EnergySpace<T>,
    /// Dipoles `v_x`, `x ≠ o`, as coordinate columns.
    pub dipoles: DenseMatrix<T>,
}

impl<T: Real> KlPair<T> {
    pub fn k(&self) -> &OperatorBetween<T> {
        self.pair.a()
    }

    pub fn l(&self) -> &OperatorBetween<T> {
        self.pair.b()
    }

    /// `⟨Kδ_x, v_y⟩_E`, rows `x ∈ V`, columns `y ≠ o`.
    pub fn k_dipole_pairing(&self) -> DenseMatrix<T> {
        let k = self.k();
        k.matrix()
            .transpose()
            .matmul(&k.codomain().gram().matmul(&self.dipoles))
    }

    /// `δ_xy − δ_xo`, the expected value of [`Self::k_dipole_pairing`].
    pub fn k_dipole_pairing_expected(&self) -> DenseMatrix<T> {
        let es = &self.energy;
        let o = es.network().base();
        DenseMatrix::from_fn(es.network().vertex_count(), es.dim(), |x, k| {
            let y = es.coordinate_vertex(k);
            let kron = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
            kron(x, y) - kron(x, o)
        })
    }

    /// `⟨Lv_y, Lv_x⟩_{l²}`, expected `δ_xy + 1`.
    pub fn l_dipole_gram(&self) -> DenseMatrix<T> {
        let lv = self.l().matrix().matmul(&self.dipoles);
        lv.transpose().matmul(&lv)
    }

    pub fn l_dipole_gram_expected(&self) -> DenseMatrix<T> {
        let n = self.energy.dim();
        DenseMatrix::from_fn(n, n, |i, j| if i == j { T::lit(2.0) } else { T::one() })
    }
}

pub fn kl_pair<T: Real>(n: &Network<T>) -> Result<KlPair<T>> {
    let energy = EnergySpace::new(n.clone())?;
    let lambda = energy.gram().to_dense();
    let (nv, ne) = (n.vertex_count(), energy.dim());
    let o = n.base();
    let k = DenseMatrix::from_fn(ne, nv, |i, x| match energy.coordinate_of(x) {
        None => -T::one(),
        Some(j) if j == i => T::one(),
        Some(_) => T::zero(),
    });
    // Lf = Δf for f pinned at o; the base row is minus the sum of the others.
    let l = DenseMatrix::from_fn(nv, ne, |x, j| match energy.coordinate_of(x) {
        Some(i) => lambda[(i, j)],
        None => -(0..ne).map(|i| lambda[(i, j)]).sum::<T>(),
    });
    debug_assert_eq!(energy.coordinate_of(o), None);
    let l2 = WeightedSpace::euclidean(nv, "l2(V)");
    let he = energy.weighted_space()?;
    let pair = SymmetricPair::new(
        OperatorBetween::new(k, l2.clone(), he.clone())?,
        OperatorBetween::new(l, he, l2)?,
    )?;
    let dipoles = energy.dipole_matrix()?;
    Ok(KlPair { pair, energy, dipoles })
}

#[derive(Clone, Debug)]
pub struct SelfadjointProducts<T> {
    /// `K*K` on `l²(V)`.
    pub k_star_k: DenseMatrix<T>,
    /// `‖K*K − Δ‖_F / ‖Δ‖_F` against the graph Laplacian on `l²(V)`.
    pub laplacian_residual: T,
    /// `L*L` on `H_E`.
    pub l_star_l: DenseMatrix<T>,
    /// `max_x ‖L*Lv_x − (δ_x − δ_o)‖_E`.
    pub dipole_residual: T,
    /// `dim ker L*L`.
    pub kernel_dim: usize,
}

pub fn selfadjoint_products<T: Real>(kl: &KlPair<T>) -> Result<SelfadjointProducts<T>> {
    let k_star_k = kl.k().adjoint().compose(kl.k())?.matrix().clone();
    let lap = kl.energy.network().laplacian().to_dense();
    let laplacian_residual = (&k_star_k - &lap).frobenius_norm() / lap.frobenius_norm().max(T::min_positive_value());

    let he = kl.l().domain().clone();
    let l_star_l = kl.l().adjoint().compose(kl.l())?.matrix().clone();
    let mut dipole_residual = T::zero();
    let n = kl.energy.dim();
    for j in 0..n {
        let got = l_star_l.matvec(&kl.dipoles.column(j));
        // δ_x − δ_o has pinned coordinates e_x + 𝟙.
        let diff: Vec<T> = (0..n)
            .map(|i| got[i] - T::one() - if i == j { T::one() } else { T::zero() })
            .collect();
        dipole_residual = dipole_residual.max(he.norm(&diff));
    }
    let kernel_dim = if n == 0 {
        0
    } else {
        null_space(&l_star_l, he.gram())?.cols()
    };
    Ok(SelfadjointProducts {
        k_star_k,
        laplacian_residual,
        l_star_l,
        dipole_residual,
        kernel_dim,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BigLProbe<T> {
    pub indices: (usize, usize),
    /// `min |λ + 1|` over the spectrum of `A*B*`.
    pub distance_to_minus_one: T,
    pub min_eigenvalue: T,
    pub symmetry_residual: T,
}

/// Assembles `L = [[0, B], [A, 0]]` from the K/L pair and looks for
/// eigenvalue `−1` of `A*B*`.
pub fn big_l_selfadjointness_probe<T: Real>(n: &Network<T>) -> Result<BigLProbe<T>> {
    let kl = kl_pair(n)?;
    let l = build_l(&kl.pair)?;
    let defect = defect_space(&kl.pair)?;
    let distance = defect
        .eigenvalues
        .iter()
        .map(|&l| (l + T::one()).abs())
        .fold(T::infinity(), T::min);
    Ok(BigLProbe {
        indices: defect.indices(),
        distance_to_minus_one: distance,
        min_eigenvalue: defect.eigenvalues.first().copied().unwrap_or(T::zero()),
        symmetry_residual: l.symmetry_residual,
    })
}

/// `𝒟 = span{δ_x}` inside `H₁ = l²(V)` and `H₂ = H_E`.
#[derive(Clone, Debug)]
pub struct NetworkDuality<T = f64> {
    pub common_domain: CommonDomain<T>,
    pub delta: OperatorBetween<T>,
    /// `‖Δ_duality − Δ‖_F / ‖Δ‖_F` against the graph Laplacian.
    pub laplacian_residual: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentCheck<T> {
    pub total_mass: T,
    pub l2_norm_sq: T,
    pub first_moment: T,
    pub energy_sq: T,
}

impl<T: Real> MomentCheck<T> {
    /// Largest relative mismatch of the two moment identities.
    pub fn residual(&self) -> T {
        let rel = |a: T, b: T| {
            if b == T::zero() {
                a.abs()
            } else {
                (a - b).abs() / b.abs()
            }
        };
        rel(self.total_mass, self.l2_norm_sq).max(rel(self.first_moment, self.energy_sq))
    }
}

impl<T: Real> NetworkDuality<T> {
    /// Zeroth and first moments of `μ_φ` against `‖φ‖²_{l²}` and `‖φ‖²_E`.
    pub fn moments(&self, phi: &[T]) -> Result<MomentCheck<T>> {
        let mu = spectral_measure(&self.delta, phi)?;
        let phi2 = self.common_domain.image2().matvec(phi);
        Ok(MomentCheck {
            total_mass: mu.total_mass(),
            l2_norm_sq: phi.iter().map(|&p| p * p).sum(),
            first_moment: mu.moment(1),
            energy_sq: self.common_domain.h2().inner(&phi2, &phi2),
        })
    }
}

pub fn network_duality<T: Real>(n: &Network<T>) -> Result<NetworkDuality<T>> {
    let kl = kl_pair(n)?;
    let nv = n.vertex_count();
    let ambient = WeightedSpace::euclidean(nv, "functions");
    let e1 = OperatorBetween::new(DenseMatrix::identity(nv), ambient.clone(), kl.k().domain().clone())?;
    let e2 = OperatorBetween::new(kl.k().matrix().clone(), ambient, kl.k().codomain().clone())?;
    let common_domain = CommonDomain::new(DenseMatrix::identity(nv), e1, e2)?;
    let delta = duality_operator(&common_domain)?;
    let lap = n.laplacian().to_dense();
    let space = delta.domain().clone();
    let laplacian_residual =
        hs_norm(&(delta.matrix() - &lap), &space, &space) / lap.frobenius_norm().max(T::min_positive_value());
    Ok(NetworkDuality {
        common_domain,
        delta,
        laplacian_residual,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormComparability<T> {
    /// `max_x ‖δ_x‖²_E / ‖δ_x‖²_{l²} = max_x c(x)`.
    pub max_conductance: T,
    pub argmax: String,
    /// `max_x ‖v_x‖²_{l²} / ‖v_x‖²_E` over dipoles pinned at the base;
    /// computed only for networks within the dense-solve limit.
    pub dipole_ratio: Option<T>,
    /// `max c(x) ≤ ‖Δ‖ ≤ 2 max c(x)` on `l²`.
    pub laplacian_norm_bounds: (T, T),
}

pub fn norm_comparability_probe<T: Real>(n: &Network<T>) -> Result<NormComparability<T>> {
    let (argmax, max_conductance) = (0..n.vertex_count())
        .map(|x| (x, n.total_conductance(x)))
        .fold((0, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
    let dipole_ratio = if n.vertex_count() <= super::DENSE_LIMIT && n.vertex_count() > 1 {
        let es = EnergySpace::new(n.clone())?;
        let mut worst = T::zero();
        for k in 0..es.dim() {
            let x = es.coordinate_vertex(k);
            let v = es.dipole(x)?;
            let l2: T = v.iter().map(|&a| a * a).sum();
            worst = worst.max(l2 / v[x]);
        }
        Some(worst)
    } else {
        None
    };
    Ok(NormComparability {
        max_conductance,
        argmax: n.label(argmax).to_string(),
        dipole_ratio,
        laplacian_norm_bounds: (max_conductance, T::lit(2.0) * max_conductance),
    })
}
