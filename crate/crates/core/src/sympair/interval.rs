//! The interval example: `A` = inclusion modulo constants, `B = −d²/dx²`.
//!
//! The defect equation `A*B*u = −u` becomes `u″ = u`, solved by `eˣ` and
//! `e⁻ˣ`. On their span `B*u = −u`, so `BB* = I`.

use crate::error::{Error, Result};
use crate::linalg::{spd_inverse, DenseMatrix};
use crate::Real;

use super::DefectModel;

const MIN_GRID: usize = 16;
const REFINE_TOL: f64 = 1e-4;
const SLOPE_CUT: f64 = 0.1;

fn candidates<T: Real>(x: T) -> [T; 2] {
    [x.exp(), (-x).exp()]
}

fn grid<T: Real>(n: usize, lo: T, hi: T) -> (Vec<T>, T) {
    let h = (hi - lo) / T::from_usize(n - 1).unwrap();
    ((0..n).map(|j| lo + h * T::from_usize(j).unwrap()).collect(), h)
}

/// Composite trapezoid rule with Gregory end corrections through third
/// differences. Needs at least eight samples.
pub fn gregory_quadrature<T: Real>(f: &[T], h: T) -> T {
    let n = f.len();
    assert!(n >= 8, "Gregory quadrature needs at least 8 samples");
    let last = n - 1;
    let mut s: T = f.iter().copied().sum::<T>() - (f[0] + f[last]) * T::lit(0.5);
    let d1 = (f[last] - f[last - 1]) - (f[1] - f[0]);
    let d2 = (f[last] - T::lit(2.0) * f[last - 1] + f[last - 2]) + (f[2] - T::lit(2.0) * f[1] + f[0]);
    let d3 = (f[last] - T::lit(3.0) * f[last - 1] + T::lit(3.0) * f[last - 2] - f[last - 3])
        - (f[3] - T::lit(3.0) * f[2] + T::lit(3.0) * f[1] - f[0]);
    s -= d1 / T::lit(12.0) + d2 / T::lit(24.0) + d3 * T::lit(19.0) / T::lit(720.0);
    s * h
}

fn gram_on_grid<T: Real>(n: usize, lo: T, hi: T) -> DenseMatrix<T> {
    let (xs, h) = grid(n, lo, hi);
    let samples: Vec<[T; 2]> = xs.iter().map(|&x| candidates(x)).collect();
    DenseMatrix::from_fn(2, 2, |k, l| {
        let f: Vec<T> = samples.iter().map(|s| s[k] * s[l]).collect();
        gregory_quadrature(&f, h)
    })
}

/// Coefficients of `u″` on the span, fitted by least squares to interior
/// central second differences.
fn second_derivative_action<T: Real>(n: usize, lo: T, hi: T) -> Result<DenseMatrix<T>> {
    let (xs, h) = grid(n, lo, hi);
    let samples: Vec<[T; 2]> = xs.iter().map(|&x| candidates(x)).collect();
    let s = DenseMatrix::from_fn(n - 2, 2, |i, k| samples[i + 1][k]);
    let d = DenseMatrix::from_fn(n - 2, 2, |i, k| {
        (samples[i + 2][k] - T::lit(2.0) * samples[i + 1][k] + samples[i][k]) / (h * h)
    });
    let st = s.transpose();
    Ok(spd_inverse(&st.matmul(&s))?.matmul(&st.matmul(&d)))
}

fn validate<T: Real>(grid_points: usize, lo: T, hi: T) -> Result<()> {
    if grid_points < MIN_GRID {
        return Err(Error::InvalidInput(format!(
            "grid needs at least {MIN_GRID} points, got {grid_points}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!(
            "interval ({lo}, {hi}) is empty or unbounded"
        )));
    }
    Ok(())
}

/// Largest entrywise change of the Gram matrix when `h` is halved,
/// relative to its largest entry.
pub fn refinement_change<T: Real>(grid_points: usize, lo: T, hi: T) -> T {
    let coarse = gram_on_grid(grid_points, lo, hi);
    let fine = gram_on_grid(2 * grid_points - 1, lo, hi);
    (&fine - &coarse).max_abs() / fine.max_abs()
}

/// Defect model of the interval example on `(lo, hi)`.
///
/// `gram` is `∫uv dx` over `{eˣ, e⁻ˣ}`, `bb_star_action = I`, and
/// `ab_star_action = −(u″ coefficients)` assembled from second differences.
/// `tolerance` is `h²`, the truncation scale of the stencil.
pub fn interval_defect_model<T: Real>(grid_points: usize, interval: (T, T)) -> Result<DefectModel<T>> {
    let (lo, hi) = interval;
    validate(grid_points, lo, hi)?;
    let change = refinement_change(grid_points, lo, hi);
    if !(change <= T::lit(REFINE_TOL)) {
        return Err(Error::GridTooCoarse {
            relative_change: change.as_f64(),
        });
    }
    let gram = gram_on_grid(grid_points, lo, hi);
    let ab = second_derivative_action(grid_points, lo, hi)?.scale(-T::one());
    let h = (hi - lo) / T::from_usize(grid_points - 1).unwrap();
    DefectModel::assembled(gram, DenseMatrix::identity(2), ab, (h * h).max(change))
}

/// Growing intervals `(−R, R)` and the square-integrability verdict for
/// each candidate as `R → ∞`.
#[derive(Clone, Debug)]
pub struct IntervalSweep<T> {
    pub radii: Vec<T>,
    /// `log ‖u‖` on `(−R, R)`, one row per candidate.
    pub log_norms: Vec<Vec<T>>,
    /// Least-squares slope of `log ‖u‖` against `R`.
    pub slopes: Vec<T>,
    /// Candidate is not square-integrable on the line.
    pub excluded: Vec<bool>,
    /// Defect dimension on each finite interval of the sweep.
    pub finite_dims: Vec<usize>,
}

impl<T: Real> IntervalSweep<T> {
    pub fn limiting_dim(&self) -> usize {
        self.excluded.iter().filter(|&&e| !e).count()
    }

    pub fn limiting_indices(&self) -> (usize, usize) {
        let d = self.limiting_dim();
        (d, d)
    }
}

pub fn interval_sweep<T: Real>(grid_points: usize, radii: &[T]) -> Result<IntervalSweep<T>> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("sweep needs at least two radii".into()));
    }
    let mut log_norms = [Vec::with_capacity(radii.len()), Vec::with_capacity(radii.len())];
    let mut finite_dims = Vec::with_capacity(radii.len());
    for &r in radii {
        let model = interval_defect_model(grid_points, (-r, r))?;
        for (k, row) in log_norms.iter_mut().enumerate() {
            row.push(model.gram[(k, k)].ln() * T::lit(0.5));
        }
        finite_dims.push(model.dim);
    }
    let slopes: Vec<T> = log_norms.iter().map(|row| slope(radii, row)).collect();
    let excluded = slopes.iter().map(|&s| s > T::lit(SLOPE_CUT)).collect();
    Ok(IntervalSweep {
        radii: radii.to_vec(),
        log_norms: log_norms.to_vec(),
        slopes,
        excluded,
        finite_dims,
    })
}

fn slope<T: Real>(x: &[T], y: &[T]) -> T {
    let n = T::from_usize(x.len()).unwrap();
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let sxy: T = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let sxx: T = x.iter().map(|&a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_is_exact_for_cubics() {
        let (xs, h) = grid(17, 0.0, 2.0);
        let f: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        assert!((gregory_quadrature(&f, h) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn unit_interval_gram() {
        let e = std::f64::consts::E;
        let m = interval_defect_model(256, (0.0, 1.0)).unwrap();
        let expected = DenseMatrix::from_rows(&[&[(e * e - 1.0) / 2.0, 1.0], &[1.0, (1.0 - e.powi(-2)) / 2.0]]);
        assert!((&m.gram - &expected).max_abs() < 1e-10);
        assert_eq!(m.indices(), (2, 2));
        assert!((&m.ab_star_action + &DenseMatrix::identity(2)).max_abs() < m.tolerance);
    }

    #[test]
    fn short_grid_is_rejected() {
        assert_eq!(interval_defect_model(8, (0.0, 1.0)).unwrap_err().name(), "InvalidInput");
    }

    #[test]
    fn coarse_grid_on_long_interval() {
        let err = interval_defect_model(16, (-40.0, 40.0)).unwrap_err();
        assert_eq!(err.name(), "GridTooCoarse");
    }
}
