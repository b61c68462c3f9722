//! Thin helpers over `nalgebra` for the small symmetric systems used here.

use nalgebra::{DMatrix, DVector};

/// Inverse of a symmetric matrix through its eigendecomposition.
///
/// Returns the (pseudo-)inverse and whether the matrix is comfortably
/// positive definite: every eigenvalue must exceed `1e-10 · trace`.
/// Eigen-directions that fail the threshold are dropped from the inverse.
pub fn sym_inverse(m: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let n = m.nrows();
    if n == 0 {
        return (DMatrix::zeros(0, 0), true);
    }
    let sym = (m + m.transpose()) * 0.5;
    let trace = sym.trace();
    let eig = sym.symmetric_eigen();
    let threshold = 1e-10 * trace.abs();
    let mut reliable = trace > 0.0 && eig.eigenvalues.iter().all(|v| v.is_finite());
    let mut inv_vals = DVector::zeros(n);
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev > threshold && ev > 0.0 {
            inv_vals[k] = 1.0 / ev;
        } else {
            reliable = false;
        }
    }
    let v = &eig.eigenvectors;
    let inv = v * DMatrix::from_diagonal(&inv_vals) * v.transpose();
    (inv, reliable)
}

/// Solves `m x = b` for symmetric positive-definite `m`.
pub fn solve_spd(m: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let chol = m.clone().cholesky()?;
    Some(chol.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_spd() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let (inv, ok) = sym_inverse(&m);
        assert!(ok);
        let id = &m * &inv;
        assert!((id - DMatrix::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn singular_is_flagged() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let (_, ok) = sym_inverse(&m);
        assert!(!ok);
        assert!(solve_spd(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]), &DVector::from_vec(vec![1.0, 1.0])).is_none());
    }
}
