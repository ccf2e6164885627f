use num_complex::Complex64;

use crate::linalg::{cdot, col, norm, CMatrix, LeastSquares};

#[derive(Debug, Clone, PartialEq)]
pub struct OmpSolution {
    /// Selected columns in selection order.
    pub support: Vec<usize>,
    /// Least-squares coefficients, aligned with `support`.
    pub coefficients: Vec<Complex64>,
}

/// Plain orthogonal matching pursuit on `y = Psi v`.
///
/// Stops after `sparsity` picks or once the residual vanishes relative to
/// `y`, so a zero measurement yields an empty support.
pub fn omp_reference(y: &[Complex64], psi: &CMatrix, sparsity: usize) -> OmpSolution {
    let mut support: Vec<usize> = Vec::new();
    let mut coefficients = Vec::new();
    let mut residual = y.to_vec();
    let floor = 1e-12 * (1.0 + norm(y));
    while support.len() < sparsity.min(psi.ncols()) && norm(&residual) > floor {
        let mut best = None;
        let mut best_val = -1.0;
        for j in 0..psi.ncols() {
            if support.contains(&j) {
                continue;
            }
            let c = cdot(col(psi, j), &residual).norm();
            if c > best_val {
                best_val = c;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        support.push(j);
        let cols: Vec<&[Complex64]> = support.iter().map(|&s| col(psi, s)).collect();
        let ls = LeastSquares::new(&cols);
        let x = ls.solve(y);
        ls.residual(y, &x, &mut residual);
        coefficients = x.iter().copied().collect();
    }
    OmpSolution {
        support,
        coefficients,
    }
}
