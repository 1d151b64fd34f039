//! Diagonally preconditioned conjugate gradients.

use crate::error::{Error, Result};
use crate::Real;

use super::vector::{axpy, dot, norm};
use super::{KernelTolerances, SparseSymmetric};

/// Solves `m·x = rhs` for SPD `m`.
pub fn solve_spd<T: Real>(m: &SparseSymmetric<T>, rhs: &[T]) -> Result<Vec<T>> {
    solve_spd_with(m, rhs, &KernelTolerances::default())
}

/// Solves `m·x = rhs` where `m` is SPD on the complement of the constants
/// and annihilates them (a graph Laplacian of a connected graph). The
/// solution is normalized so that `x[pin] = 0`.
pub fn solve_spd_pinned<T: Real>(
    m: &SparseSymmetric<T>,
    rhs: &[T],
    pin: usize,
    tol: &KernelTolerances,
) -> Result<Vec<T>> {
    let n = m.dim();
    check_len(n, rhs)?;
    if pin >= n {
        return Err(Error::DimensionMismatch(format!(
            "pin index {pin} outside dimension {n}"
        )));
    }
    let rhs_norm = norm(rhs);
    let along_constants = rhs.iter().copied().sum::<T>().abs() / T::lit(n as f64).sqrt();
    if along_constants > T::tol(tol.kernel_consistency) * rhs_norm {
        return Err(Error::InconsistentRhs {
            residual: (along_constants / rhs_norm).as_f64(),
        });
    }
    let reduced_rhs: Vec<T> = rhs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pin)
        .map(|(_, &v)| v)
        .collect();
    let y = solve_spd_with(&m.without_index(pin), &reduced_rhs, tol)?;
    let mut x = Vec::with_capacity(n);
    x.extend_from_slice(&y[..pin]);
    x.push(T::zero());
    x.extend_from_slice(&y[pin..]);
    Ok(x)
}

pub fn solve_spd_with<T: Real>(m: &SparseSymmetric<T>, rhs: &[T], tol: &KernelTolerances) -> Result<Vec<T>> {
    let n = m.dim();
    check_len(n, rhs)?;
    let b_norm = norm(rhs);
    let mut x = vec![T::zero(); n];
    if b_norm == T::zero() {
        return Ok(x);
    }
    let target = T::tol(tol.cg_residual) * b_norm;
    let inv_diag: Vec<T> = m
        .diagonal()
        .into_iter()
        .map(|d| if d > T::zero() { T::one() / d } else { T::one() })
        .collect();
    let precondition = |r: &[T]| -> Vec<T> { r.iter().zip(&inv_diag).map(|(&a, &b)| a * b).collect() };

    let max_iter = tol.cg_max_iter_factor * n.max(1);
    let mut r = rhs.to_vec();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let mp = m.matvec(&p);
        let pmp = dot(&p, &mp);
        if !(pmp > T::zero()) {
            return Err(Error::NotSpd {
                index: 0,
                pivot: pmp.as_f64(),
            });
        }
        let alpha = rz / pmp;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &mp, &mut r);
        if norm(&r) <= target {
            // The recursive residual drifts; confirm against the true one.
            let mut true_r = rhs.to_vec();
            axpy(-T::one(), &m.matvec(&x), &mut true_r);
            if norm(&true_r) <= target {
                return Ok(x);
            }
            r = true_r;
            z = precondition(&r);
            p = z.clone();
            rz = dot(&r, &z);
            continue;
        }
        z = precondition(&r);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let mut true_r = rhs.to_vec();
    axpy(-T::one(), &m.matvec(&x), &mut true_r);
    let residual = norm(&true_r);
    if residual <= target {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual: (residual / b_norm).as_f64(),
        })
    }
}

fn check_len<T>(n: usize, rhs: &[T]) -> Result<()> {
    if rhs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} for dimension {n}",
            rhs.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3_laplacian() -> SparseSymmetric<f64> {
        SparseSymmetric::assemble(3, [(0, 0, 1.0), (1, 1, 2.0), (2, 2, 1.0), (0, 1, -1.0), (1, 2, -1.0)]).unwrap()
    }

    #[test]
    fn identity_system() {
        let id = SparseSymmetric::new(3, vec![(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]).unwrap();
        assert_eq!(solve_spd(&id, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn grounded_path_dipole() {
        let x = solve_spd_pinned(&p3_laplacian(), &[-1.0, 1.0, 0.0], 0, &KernelTolerances::default()).unwrap();
        for (a, b) in x.iter().zip([0.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn inconsistent_rhs_detected() {
        let p2 = SparseSymmetric::assemble(2, [(0, 0, 1.0), (1, 1, 1.0), (0, 1, -1.0)]).unwrap();
        let err = solve_spd_pinned(&p2, &[1.0, 1.0], 0, &KernelTolerances::default()).unwrap_err();
        assert!(matches!(err, Error::InconsistentRhs { .. }));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        assert_eq!(
            solve_spd(&p3_laplacian().without_index(0), &[0.0, 0.0]).unwrap(),
            vec![0.0, 0.0]
        );
    }
}
