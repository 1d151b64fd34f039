use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::Real;

use super::DenseMatrix;

/// Symmetric matrix stored by its upper triangle (`row <= col`).
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymmetric<T> {
    dim: usize,
    triplets: Vec<(usize, usize, T)>,
}

impl<T: Real> SparseSymmetric<T> {
    /// Validates indices, orientation and uniqueness of the stored entries.
    pub fn new(dim: usize, triplets: Vec<(usize, usize, T)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(triplets.len());
        for &(r, c, v) in &triplets {
            if r >= dim || c >= dim {
                return Err(Error::InvalidInput(format!("entry ({r},{c}) outside dimension {dim}")));
            }
            if r > c {
                return Err(Error::InvalidInput(format!("entry ({r},{c}) below the diagonal")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("entry ({r},{c}) is not finite")));
            }
            if !seen.insert((r, c)) {
                return Err(Error::InvalidInput(format!("duplicate entry ({r},{c})")));
            }
        }
        Ok(Self { dim, triplets })
    }

    /// Accumulates arbitrary `(i, j, v)` contributions, folding each into the
    /// upper triangle and summing duplicates.
    pub fn assemble(dim: usize, entries: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (i, j, v) in entries {
            let key = if i <= j { (i, j) } else { (j, i) };
            *acc.entry(key).or_insert_with(T::zero) += v;
        }
        Self::new(dim, acc.into_iter().map(|((i, j), v)| (i, j, v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn triplets(&self) -> &[(usize, usize, T)] {
        &self.triplets
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![T::zero(); self.dim];
        for &(r, c, v) in &self.triplets {
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
        y
    }

    pub fn diagonal(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.dim];
        for &(r, c, v) in &self.triplets {
            if r == c {
                d[r] += v;
            }
        }
        d
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.triplets {
            m[(r, c)] += v;
            if r != c {
                m[(c, r)] += v;
            }
        }
        m
    }

    /// Deletes row and column `k`, renumbering the remaining indices.
    pub fn without_index(&self, k: usize) -> Self {
        assert!(k < self.dim);
        let shift = |i: usize| if i > k { i - 1 } else { i };
        let triplets = self
            .triplets
            .iter()
            .filter(|&&(r, c, _)| r != k && c != k)
            .map(|&(r, c, v)| (shift(r), shift(c), v))
            .collect();
        Self {
            dim: self.dim - 1,
            triplets,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_triplets() {
        assert!(SparseSymmetric::<f64>::new(2, vec![(1, 0, 1.0)]).is_err());
        assert!(SparseSymmetric::<f64>::new(2, vec![(0, 2, 1.0)]).is_err());
        assert!(SparseSymmetric::<f64>::new(2, vec![(0, 1, 1.0), (0, 1, 2.0)]).is_err());
    }

    #[test]
    fn matvec_uses_symmetric_closure() {
        let m = SparseSymmetric::new(2, vec![(0, 0, 2.0), (0, 1, -1.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(m.matvec(&[1.0, 1.0]), vec![1.0, 2.0]);
        assert_eq!(m.to_dense().matvec(&[1.0, 1.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn removing_an_index_renumbers() {
        let m = SparseSymmetric::assemble(
            3,
            vec![(0, 0, 1.0), (1, 0, -1.0), (1, 1, 2.0), (2, 1, -1.0), (2, 2, 1.0)],
        )
        .unwrap();
        let g = m.without_index(0);
        assert_eq!(g.to_dense(), DenseMatrix::from_rows(&[&[2.0, -1.0], &[-1.0, 1.0]]));
    }
}
