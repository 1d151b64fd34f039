use crate::linalg::vector::gram_inner;
use crate::linalg::DenseMatrix;
use crate::Real;

/// A vector of `ℂⁿ` stored as its real and imaginary parts.
///
/// Multiplication by `i` is the block rotation `(re, im) ↦ (−im, re)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector2<T> {
    pub re: Vec<T>,
    pub im: Vec<T>,
}

impl<T: Real> ComplexVector2<T> {
    pub fn new(re: Vec<T>, im: Vec<T>) -> Self {
        assert_eq!(re.len(), im.len(), "real and imaginary parts differ in length");
        Self { re, im }
    }

    pub fn real(re: Vec<T>) -> Self {
        let im = vec![T::zero(); re.len()];
        Self { re, im }
    }

    pub fn zeros(n: usize) -> Self {
        Self::real(vec![T::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn times_i(&self) -> Self {
        Self {
            re: self.im.iter().map(|&x| -x).collect(),
            im: self.re.clone(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            re: self.re.iter().map(|&x| x * s).collect(),
            im: self.im.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            re: self.re.iter().zip(&other.re).map(|(&a, &b)| a + b).collect(),
            im: self.im.iter().zip(&other.im).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    /// Real matrices act on both parts.
    pub fn apply(&self, m: &DenseMatrix<T>) -> Self {
        Self {
            re: m.matvec(&self.re),
            im: m.matvec(&self.im),
        }
    }

    /// `[self; other]`.
    pub fn concat(&self, other: &Self) -> Self {
        Self {
            re: self.re.iter().chain(&other.re).copied().collect(),
            im: self.im.iter().chain(&other.im).copied().collect(),
        }
    }

    pub fn split_at(&self, k: usize) -> (Self, Self) {
        let (r1, r2) = self.re.split_at(k);
        let (i1, i2) = self.im.split_at(k);
        (Self::new(r1.to_vec(), i1.to_vec()), Self::new(r2.to_vec(), i2.to_vec()))
    }

    /// `⟨self, other⟩ = self* G other`, returned as `(re, im)`.
    pub fn inner(&self, other: &Self, gram: &DenseMatrix<T>) -> (T, T) {
        let re = gram_inner(gram, &self.re, &other.re) + gram_inner(gram, &self.im, &other.im);
        let im = gram_inner(gram, &self.re, &other.im) - gram_inner(gram, &self.im, &other.re);
        (re, im)
    }

    pub fn norm_sq(&self, gram: &DenseMatrix<T>) -> T {
        self.inner(self, gram).0
    }

    /// `[re; im]`.
    pub fn stacked(&self) -> Vec<T> {
        self.re.iter().chain(&self.im).copied().collect()
    }
}

/// Real `2m × 2n` representation `[[P, −Q], [Q, P]]` of `P + iQ`.
pub fn realify<T: Real>(p: &DenseMatrix<T>, q: &DenseMatrix<T>) -> DenseMatrix<T> {
    DenseMatrix::from_blocks(p, &q.scale(-T::one()), q, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let v = ComplexVector2::new(vec![1.0, 2.0], vec![3.0, -1.0]);
        assert_eq!(v.times_i().times_i(), v.scale(-1.0));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_slot() {
        let g = DenseMatrix::identity(1);
        let a = ComplexVector2::new(vec![0.0], vec![1.0]);
        let b = ComplexVector2::real(vec![1.0]);
        // ⟨i, 1⟩ = −i
        assert_eq!(a.inner(&b, &g), (0.0, -1.0));
        assert_eq!(a.norm_sq(&g), 1.0);
    }

    #[test]
    fn realify_matches_times_i() {
        let i = realify(&DenseMatrix::<f64>::zeros(2, 2), &DenseMatrix::identity(2));
        let v = ComplexVector2::new(vec![1.0, 2.0], vec![3.0, 4.0]);
        assert_eq!(i.matvec(&v.stacked()), v.times_i().stacked());
    }
}
