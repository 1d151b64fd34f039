use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::WeightedSpace;
use crate::linalg::{
    back_substitute_transposed, cholesky_spd, forward_substitute, solve_spd_with, DenseMatrix, KernelTolerances,
    SparseSymmetric,
};
use crate::Real;

use super::{energy_inner, Network};

/// Networks up to this many vertices are solved by dense Cholesky, larger
/// ones by conjugate gradients.
pub const DENSE_LIMIT: usize = 200;

const CG_RESIDUAL: f64 = 1e-13;

/// `H_E` modulo constants, pinned at the base: coordinates are `u(x) − u(o)`
/// for `x ≠ o` and the Gram matrix is the grounded Laplacian.
#[derive(Clone, Debug)]
pub struct EnergySpace<T = f64> {
    network: Network<T>,
    gram: SparseSymmetric<T>,
    factor: Option<DenseMatrix<T>>,
}

impl<T: Real> EnergySpace<T> {
    pub fn new(network: Network<T>) -> Result<Self> {
        let gram = network.laplacian().without_index(network.base());
        let factor = if network.vertex_count() <= DENSE_LIMIT && gram.dim() > 0 {
            Some(cholesky_spd(&gram.to_dense())?)
        } else {
            None
        };
        Ok(Self { network, gram, factor })
    }

    pub fn network(&self) -> &Network<T> {
        &self.network
    }

    /// The grounded Laplacian.
    pub fn gram(&self) -> &SparseSymmetric<T> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn weighted_space(&self) -> Result<WeightedSpace<T>> {
        WeightedSpace::new(self.gram.to_dense(), "H_E")
    }

    /// Vertex index of each coordinate.
    pub fn coordinate_vertex(&self, k: usize) -> usize {
        if k < self.network.base() {
            k
        } else {
            k + 1
        }
    }

    /// Coordinate of a non-base vertex.
    pub fn coordinate_of(&self, x: usize) -> Option<usize> {
        use std::cmp::Ordering::*;
        match x.cmp(&self.network.base()) {
            Less => Some(x),
            Equal => None,
            Greater => Some(x - 1),
        }
    }

    pub fn to_coords(&self, u: &[T]) -> Vec<T> {
        let o = self.network.base();
        (0..u.len()).filter(|&x| x != o).map(|x| u[x] - u[o]).collect()
    }

    /// Vertex function vanishing at the base.
    pub fn from_coords(&self, c: &[T]) -> Vec<T> {
        let o = self.network.base();
        let mut u = Vec::with_capacity(c.len() + 1);
        u.extend_from_slice(&c[..o]);
        u.push(T::zero());
        u.extend_from_slice(&c[o..]);
        u
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        let (a, b) = (self.to_coords(u), self.to_coords(v));
        a.iter().zip(self.gram.matvec(&b)).map(|(&x, y)| x * y).sum()
    }

    /// Solves the grounded system `Λc = rhs` in coordinates.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        match &self.factor {
            Some(l) => Ok(back_substitute_transposed(l, &forward_substitute(l, rhs))),
            None if self.dim() == 0 => Ok(Vec::new()),
            None => {
                let tol = KernelTolerances {
                    cg_residual: CG_RESIDUAL,
                    ..KernelTolerances::default()
                };
                solve_spd_with(&self.gram, rhs, &tol)
            }
        }
    }

    /// The dipole `v_x`: `Δv_x = δ_x − δ_o`, `v_x(o) = 0`.
    pub fn dipole(&self, x: usize) -> Result<Vec<T>> {
        let k = self.coordinate_of(x).ok_or(Error::SameAsBase)?;
        let mut rhs = vec![T::zero(); self.dim()];
        rhs[k] = T::one();
        Ok(self.from_coords(&self.solve(&rhs)?))
    }

    /// All dipoles `v_x`, `x ≠ o`, as coordinate columns; this is `Λ⁻¹`.
    pub fn dipole_matrix(&self) -> Result<DenseMatrix<T>> {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n, n);
        for k in 0..n {
            let mut rhs = vec![T::zero(); n];
            rhs[k] = T::one();
            m.set_column(k, &self.solve(&rhs)?);
        }
        Ok(m)
    }

    /// `R(x, y) = ‖v_x − v_y‖²_E`.
    pub fn effective_resistance(&self, x: usize, y: usize) -> Result<T> {
        if x == y {
            return Ok(T::zero());
        }
        let mut rhs = vec![T::zero(); self.dim()];
        if let Some(k) = self.coordinate_of(x) {
            rhs[k] += T::one();
        }
        if let Some(k) = self.coordinate_of(y) {
            rhs[k] -= T::one();
        }
        let w = self.from_coords(&self.solve(&rhs)?);
        Ok(w[x] - w[y])
    }
}

pub fn dipole<T: Real>(n: &Network<T>, x: &str) -> Result<Vec<T>> {
    let x = n.index_of(x)?;
    EnergySpace::new(n.clone())?.dipole(x)
}

pub fn effective_resistance<T: Real>(n: &Network<T>, x: &str, y: &str) -> Result<T> {
    let (x, y) = (n.index_of(x)?, n.index_of(y)?);
    EnergySpace::new(n.clone())?.effective_resistance(x, y)
}

/// `‖f(x) − f(o) − ⟨v_x, f⟩_E‖` for a given `f`.
pub fn reproducing_residual<T: Real>(es: &EnergySpace<T>, x: usize, f: &[T]) -> Result<T> {
    let v = es.dipole(x)?;
    let o = es.network().base();
    Ok((f[x] - f[o] - energy_inner(es.network(), &v, f)).abs())
}

/// `‖δ_x − (c(x)v_x − Σ_{y∼x} c_xy v_y)‖_E`, with `v_o = 0`.
pub fn delta_identity_check<T: Real>(es: &EnergySpace<T>, x: usize) -> Result<T> {
    let n = es.network();
    let o = n.base();
    let dip = |y: usize| {
        if y == o {
            Ok(vec![T::zero(); n.vertex_count()])
        } else {
            es.dipole(y)
        }
    };
    let mut w: Vec<T> = dip(x)?.into_iter().map(|v| v * n.total_conductance(x)).collect();
    for &(y, c) in n.neighbors(x) {
        for (wi, vi) in w.iter_mut().zip(dip(y)?) {
            *wi -= c * vi;
        }
    }
    let d: Vec<T> = n.delta(x).iter().zip(&w).map(|(&a, &b)| a - b).collect();
    Ok(energy_inner(n, &d, &d).max(T::zero()).sqrt())
}

/// `|⟨φ, v_x⟩_E| / ‖φ‖_{l²}`.
pub fn sqrt2_ratio<T: Real>(n: &Network<T>, v_x: &[T], phi: &[T]) -> T {
    let l2 = phi.iter().map(|&p| p * p).sum::<T>().sqrt();
    energy_inner(n, phi, v_x).abs() / l2
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sqrt2Report<T> {
    /// Largest ratio over the random trials.
    pub max_ratio: T,
    /// Ratio at `φ = δ_x − δ_o`.
    pub extremal_ratio: T,
    pub trials: usize,
}

/// Samples finitely supported `φ` and records `|⟨φ, v_x⟩_E| / ‖φ‖_{l²}`,
/// bounded by `√2`.
pub fn sqrt2_bound_check<T: Real, R: Rng>(
    es: &EnergySpace<T>,
    x: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Sqrt2Report<T>> {
    let n = es.network();
    let v = es.dipole(x)?;
    let nv = n.vertex_count();
    let mut max_ratio = T::zero();
    for _ in 0..trials {
        let mut phi = vec![T::zero(); nv];
        let support = rng.gen_range(1..=nv);
        for _ in 0..support {
            phi[rng.gen_range(0..nv)] = T::lit(rng.gen_range(-1.0..1.0));
        }
        if phi.iter().all(|&p| p == T::zero()) {
            continue;
        }
        max_ratio = max_ratio.max(sqrt2_ratio(n, &v, &phi));
    }
    let mut extremal = n.delta(x);
    extremal[n.base()] = -T::one();
    Ok(Sqrt2Report {
        max_ratio,
        extremal_ratio: sqrt2_ratio(n, &v, &extremal),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{binary_tree, path};
    use rand::SeedableRng;

    #[test]
    fn p3_dipoles() {
        let p3 = path::<f64>(3).unwrap();
        let close = |a: Vec<f64>, b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(dipole(&p3, "1").unwrap(), &[0.0, 1.0, 1.0]));
        assert!(close(dipole(&p3, "2").unwrap(), &[0.0, 1.0, 2.0]));
        assert_eq!(dipole(&p3, "0").unwrap_err().name(), "SameAsBase");
        assert_eq!(dipole(&p3, "9").unwrap_err().name(), "UnknownVertex");
        assert!((effective_resistance(&p3, "0", "1").unwrap() - 1.0).abs() < 1e-12);
        assert!((effective_resistance(&p3, "2", "1").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p3_delta_identity() {
        let es = EnergySpace::new(path::<f64>(3).unwrap()).unwrap();
        for x in 0..3 {
            assert!(delta_identity_check(&es, x).unwrap() < 1e-12);
        }
    }

    #[test]
    fn sqrt2_attained() {
        let es = EnergySpace::new(path::<f64>(4).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = sqrt2_bound_check(&es, 2, 200, &mut rng).unwrap();
        assert!(r.max_ratio <= 2f64.sqrt() + 1e-12);
        assert!((r.extremal_ratio - 2f64.sqrt()).abs() < 1e-12);
        let v = es.dipole(2).unwrap();
        assert!((sqrt2_ratio(es.network(), &v, &es.network().delta(2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cg_path_matches_dense() {
        // 255 vertices: above the dense limit
        let tree = binary_tree::<f64>(7, 1.0).unwrap();
        let es = EnergySpace::new(tree).unwrap();
        // tree edges are in series: R(root, child) = 1
        assert!((es.effective_resistance(0, 1).unwrap() - 1.0).abs() < 1e-10);
        let leaf = es.network().index_of("255").unwrap();
        assert!((es.effective_resistance(0, leaf).unwrap() - 7.0).abs() < 1e-9);
    }
}
