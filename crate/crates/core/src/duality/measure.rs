use crate::error::{Error, Result};
use crate::hilbert::{CommonDomain, OperatorBetween, WeightedSpace};
use crate::linalg::DenseMatrix;
use crate::Real;

use super::operator::positive_eigen;

/// A measure on finitely many labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasureSpace<T> {
    points: Vec<String>,
    weights: Vec<T>,
}

impl<T: Real> DiscreteMeasureSpace<T> {
    pub fn new(points: Vec<String>, weights: Vec<T>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points, {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(Error::InvalidInput(format!(
                "weight {w} is not a finite nonnegative number"
            )));
        }
        Ok(Self { points, weights })
    }

    /// Points labelled `p0, p1, …`.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        Self::new((0..weights.len()).map(|i| format!("p{i}")).collect(), weights)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Indices carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&i| self.weights[i] > T::zero())
            .collect()
    }

    /// `L²(μ)`, with one coordinate per point of the support.
    pub fn l2(&self) -> Result<WeightedSpace<T>> {
        let w: Vec<T> = self.support().into_iter().map(|i| self.weights[i]).collect();
        WeightedSpace::new(DenseMatrix::from_diag(&w), "L2(mu)")
    }

    /// Restriction of a function on all points to the support.
    pub fn restriction(&self) -> DenseMatrix<T> {
        let supp = self.support();
        DenseMatrix::from_fn(supp.len(), self.points.len(), |i, j| {
            if supp[i] == j {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

/// `𝒟` = all functions on the common point set, seen in `L²(μ₁)` and `L²(μ₂)`.
pub fn discrete_common_domain<T: Real>(
    mu1: &DiscreteMeasureSpace<T>,
    mu2: &DiscreteMeasureSpace<T>,
) -> Result<CommonDomain<T>> {
    if mu1.points() != mu2.points() {
        return Err(Error::DimensionMismatch("measures live on different point sets".into()));
    }
    let n = mu1.points().len();
    let ambient = WeightedSpace::euclidean(n, "functions");
    let e1 = OperatorBetween::new(mu1.restriction(), ambient.clone(), mu1.l2()?)?;
    let e2 = OperatorBetween::new(mu2.restriction(), ambient, mu2.l2()?)?;
    CommonDomain::new(DenseMatrix::identity(n), e1, e2)
}

/// `dμ₂/dμ₁` on the support of `μ₁`, or `None` when `μ₂` charges a
/// `μ₁`-null point.
pub fn radon_nikodym<T: Real>(mu1: &DiscreteMeasureSpace<T>, mu2: &DiscreteMeasureSpace<T>) -> Option<Vec<T>> {
    let w1 = mu1.weights();
    let w2 = mu2.weights();
    if w1.iter().zip(w2).any(|(&a, &b)| a == T::zero() && b > T::zero()) {
        return None;
    }
    Some(mu1.support().into_iter().map(|i| w2[i] / w1[i]).collect())
}

/// Finitely many atoms `(λ, mass)`, `λ` ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure<T> {
    pub atoms: Vec<(T, T)>,
}

impl<T: Real> SpectralMeasure<T> {
    pub fn total_mass(&self) -> T {
        self.atoms.iter().map(|&(_, m)| m).sum()
    }

    pub fn moment(&self, k: i32) -> T {
        self.atoms.iter().map(|&(l, m)| l.powi(k) * m).sum()
    }
}

/// `μ_φ(dλ) = ‖E_Δ(dλ)φ‖₁²` for a positive operator `Δ` on `H₁`.
///
/// Eigenvalues within `1e-9·max λ` of each other are merged into one atom
/// at their mass-weighted mean; atoms carrying less than `1e-13` of the
/// total mass are dropped.
pub fn spectral_measure<T: Real>(delta: &OperatorBetween<T>, phi: &[T]) -> Result<SpectralMeasure<T>> {
    let eig = positive_eigen(delta)?;
    let gphi = delta.domain().gram().matvec(phi);
    let masses: Vec<T> = (0..eig.dim())
        .map(|i| {
            let c: T = eig.vectors.column(i).iter().zip(&gphi).map(|(&a, &b)| a * b).sum();
            c * c
        })
        .collect();
    let total: T = masses.iter().copied().sum();
    let merge = T::tol(1e-9) * eig.max_abs_value();

    let mut groups: Vec<(T, T, T)> = Vec::new(); // (Σλm, Σm, first λ)
    for (&l, &m) in eig.values.iter().zip(&masses) {
        match groups.last_mut() {
            Some(g) if l - g.2 <= merge => {
                g.0 += l * m;
                g.1 += m;
            }
            _ => groups.push((l * m, m, l)),
        }
    }
    let floor = T::lit(1e-13) * total;
    let atoms = groups
        .into_iter()
        .filter(|&(_, m, _)| m > floor && m > T::zero())
        .map(|(lm, m, _)| (lm / m, m))
        .collect();
    Ok(SpectralMeasure { atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::dual_domain;

    type M = DenseMatrix<f64>;

    fn euclid_op(m: M) -> OperatorBetween<f64> {
        let h = WeightedSpace::euclidean(m.rows(), "l2");
        OperatorBetween::new(m, h.clone(), h).unwrap()
    }

    #[test]
    fn eigenvector_input_has_one_atom() {
        let mu = spectral_measure(&euclid_op(M::from_diag(&[2.0, 3.0])), &[1.0, 0.0]).unwrap();
        assert_eq!(mu.atoms, vec![(2.0, 1.0)]);
    }

    #[test]
    fn path_laplacian_atoms() {
        let delta = euclid_op(M::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]));
        let mu = spectral_measure(&delta, &[1.0, 0.0]).unwrap();
        assert_eq!(mu.atoms.len(), 2);
        assert!(mu.atoms[0].0.abs() < 1e-12 && (mu.atoms[0].1 - 0.5).abs() < 1e-12);
        assert!((mu.atoms[1].0 - 2.0).abs() < 1e-12 && (mu.atoms[1].1 - 0.5).abs() < 1e-12);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12 && (mu.moment(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_vector_has_empty_measure() {
        let mu = spectral_measure(&euclid_op(M::identity(2)), &[0.0, 0.0]).unwrap();
        assert!(mu.atoms.is_empty());
    }

    #[test]
    fn mutually_singular_measures() {
        let mu1 = DiscreteMeasureSpace::from_weights(vec![1.0, 0.0]).unwrap();
        let mu2 = DiscreteMeasureSpace::from_weights(vec![0.0, 1.0]).unwrap();
        let cd = discrete_common_domain(&mu1, &mu2).unwrap();
        assert_eq!(dual_domain(&cd).unwrap().cols(), 0);
        assert!(radon_nikodym(&mu1, &mu2).is_none());
    }

    #[test]
    fn equivalent_measures() {
        let mu1 = DiscreteMeasureSpace::from_weights(vec![1.0, 1.0]).unwrap();
        let mu2 = DiscreteMeasureSpace::from_weights(vec![2.0, 3.0]).unwrap();
        let cd = discrete_common_domain(&mu1, &mu2).unwrap();
        assert_eq!(dual_domain(&cd).unwrap().cols(), 2);
        let delta = super::super::duality_operator(&cd).unwrap();
        assert_eq!(delta.matrix(), &M::from_diag(&[2.0, 3.0]));
        assert_eq!(radon_nikodym(&mu1, &mu2).unwrap(), vec![2.0, 3.0]);
    }
}
