//! Small complex-vector helpers shared by the transmit and receive chains.
//!
//! Matrices are `nalgebra` column-major `DMatrix<Complex64>`; the hot loops
//! work on raw column slices.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Inner product `<a, b> = sum conj(a[n]) * b[n]`.
#[inline]
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

#[inline]
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

#[inline]
pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

/// `||a - b||^2` without allocating.
#[inline]
pub fn dist_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// Column `j` of a column-major matrix as a contiguous slice.
#[inline]
pub fn col(m: &CMatrix, j: usize) -> &[Complex64] {
    let rows = m.nrows();
    &m.as_slice()[j * rows..(j + 1) * rows]
}

#[inline]
pub fn col_mut(m: &mut CMatrix, j: usize) -> &mut [Complex64] {
    let rows = m.nrows();
    &mut m.as_mut_slice()[j * rows..(j + 1) * rows]
}

/// Frobenius norm of a matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    norm(m.as_slice())
}

/// Least-squares solver for a fixed tall matrix `A` (columns given as
/// slices), via Cholesky of the Gram matrix `A^H A`.
///
/// A rank-deficient Gram matrix falls back to the ridge-regularized
/// system `(A^H A + eps I) x = A^H y` with `eps = 1e-10`.
pub struct LeastSquares {
    a: CMatrix,
    chol: nalgebra::Cholesky<Complex64, nalgebra::Dyn>,
    regularized: bool,
}

pub const RIDGE_EPS: f64 = 1e-10;

impl LeastSquares {
    pub fn new(columns: &[&[Complex64]]) -> Self {
        let rows = columns.first().map_or(0, |c| c.len());
        let a = CMatrix::from_iterator(rows, columns.len(), columns.iter().flat_map(|c| c.iter().copied()));
        let gram = a.adjoint() * &a;
        let scale = gram.diagonal().iter().fold(0.0f64, |m, z| m.max(z.re));
        // a pivot this small relative to the largest column energy means
        // the columns are numerically dependent
        let well_posed = |chol: &nalgebra::Cholesky<Complex64, nalgebra::Dyn>| {
            chol.l_dirty().diagonal().iter().all(|d| d.re * d.re > 1e-12 * scale)
        };
        match gram.clone().cholesky().filter(well_posed) {
            Some(chol) => Self { a, chol, regularized: false },
            None => {
                let ridge = gram + CMatrix::identity(columns.len(), columns.len()) * Complex64::from(RIDGE_EPS);
                let chol = ridge
                    .cholesky()
                    .expect("ridge-regularized Gram matrix is positive definite");
                Self { a, chol, regularized: true }
            }
        }
    }

    /// Whether the ridge fallback was needed.
    pub fn regularized(&self) -> bool {
        self.regularized
    }

    pub fn solve(&self, y: &[Complex64]) -> nalgebra::DVector<Complex64> {
        let rhs = self.a.adjoint() * nalgebra::DVector::from_column_slice(y);
        self.chol.solve(&rhs)
    }

    /// `y - A x`, written into `out`.
    pub fn residual(&self, y: &[Complex64], x: &nalgebra::DVector<Complex64>, out: &mut [Complex64]) {
        let fit = &self.a * x;
        for ((o, yn), f) in out.iter_mut().zip(y).zip(fit.iter()) {
            *o = yn - f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdot_conjugates_first_argument() {
        let a = [Complex64::new(0.0, 1.0)];
        let b = [Complex64::new(0.0, 1.0)];
        assert_eq!(cdot(&a, &b), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn least_squares_recovers_exact_combination() {
        let a0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.5)];
        let a1 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.2)];
        let x = [Complex64::new(2.0, -1.0), Complex64::new(0.3, 0.7)];
        let y: Vec<Complex64> = (0..3).map(|n| a0[n] * x[0] + a1[n] * x[1]).collect();
        let ls = LeastSquares::new(&[&a0, &a1]);
        assert!(!ls.regularized());
        let est = ls.solve(&y);
        assert!((est[0] - x[0]).norm() < 1e-12 && (est[1] - x[1]).norm() < 1e-12);
        let mut r = vec![Complex64::default(); 3];
        ls.residual(&y, &est, &mut r);
        assert!(norm(&r) < 1e-12);
    }

    #[test]
    fn least_squares_falls_back_on_duplicate_columns() {
        let a0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let ls = LeastSquares::new(&[&a0, &a0]);
        assert!(ls.regularized());
        let y = [Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0)];
        let est = ls.solve(&y);
        assert!(est.iter().all(|z| z.re.is_finite()));
        assert!((est[0] + est[1] - Complex64::new(2.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn column_slices_are_column_major() {
        let m = CMatrix::from_fn(3, 2, |r, c| Complex64::new((10 * c + r) as f64, 0.0));
        assert_eq!(col(&m, 1)[2].re, 12.0);
    }
}
