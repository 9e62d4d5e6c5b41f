use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Numerical rank from singular values, relative to the largest one.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    let tol = max * 1e-10;
    sv.iter().filter(|&&s| s > tol).count()
}

/// `[B, AB, ..., A^(n-1) B]`.
pub fn controllability_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let m = b.ncols();
    let mut c = DMatrix::zeros(n, n * m);
    let mut block = b.clone();
    for i in 0..n {
        c.view_mut((0, i * m), (n, m)).copy_from(&block);
        block = a * &block;
    }
    c
}

/// Solves `A^T P + P A = -Q` through the Kronecker form.
pub fn solve_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || q.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.nrows(),
        });
    }
    let eye = DMatrix::<f64>::identity(n, n);
    let at = a.transpose();
    let lhs = eye.kronecker(&at) + at.kronecker(&eye);
    let rhs = -DVector::from_column_slice(q.as_slice());
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or(Error::RankDeficient {
            rank: n * n - 1,
            required: n * n,
        })?;
    let p = DMatrix::from_column_slice(n, n, sol.as_slice());
    Ok((&p + p.transpose()) * 0.5)
}

/// Frobenius norm of `A^T P + P A + Q`.
pub fn lyapunov_residual(a: &DMatrix<f64>, p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    (a.transpose() * p + p * a + q).norm()
}

/// Largest real part among the eigenvalues of `a`.
///
/// The Schur iteration can stall on nearly scalar matrices; the largest
/// eigenvalue of the symmetric part, an upper bound on the abscissa, is
/// returned in that case.
pub fn spectral_abscissa(a: &DMatrix<f64>) -> f64 {
    match a.clone().try_schur(f64::EPSILON, 10_000) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max),
        None => numerical_abscissa(a),
    }
}

/// Largest eigenvalue of `(a + a^T) / 2`.
pub fn numerical_abscissa(a: &DMatrix<f64>) -> f64 {
    ((a + a.transpose()) * 0.5)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Coefficients `[c_0, ..., c_(n-1)]` of the monic characteristic polynomial
/// `s^n + c_(n-1) s^(n-1) + ... + c_0` (Faddeev-LeVerrier).
pub fn characteristic_polynomial(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut coeffs = alloc::vec![0.0; n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        m = a * &m + &eye * c_prev;
        let c = -(a * &m).trace() / k as f64;
        coeffs[n - k] = c;
        c_prev = c;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyapunov_of_minus_identity() {
        let a = -DMatrix::<f64>::identity(3, 3);
        let q = DMatrix::<f64>::identity(3, 3) * 2.0;
        let p = solve_lyapunov(&a, &q).unwrap();
        assert!((p - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn lyapunov_residual_small_for_stable_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, 0.0, -3.0]);
        let q = DMatrix::<f64>::identity(2, 2);
        let p = solve_lyapunov(&a, &q).unwrap();
        assert!(lyapunov_residual(&a, &p, &q) < 1e-12);
        assert!(p.clone().symmetric_eigen().eigenvalues.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn abscissa_of_nearly_scalar_matrix() {
        let mut a = -DMatrix::<f64>::identity(4, 4);
        a[(0, 2)] = -1.1e-16;
        a[(1, 0)] = -2.2e-16;
        a[(2, 3)] = 4.4e-16;
        a[(1, 1)] = -0.9999999999999996;
        let s = spectral_abscissa(&a);
        assert!((s + 1.0).abs() < 1e-12, "{s}");
        let b = DMatrix::from_row_slice(2, 2, &[-1.0, 5.0, 0.0, -2.0]);
        assert!((spectral_abscissa(&b) + 1.0).abs() < 1e-12);
        assert!(numerical_abscissa(&b) > spectral_abscissa(&b));
    }

    #[test]
    fn charpoly_of_companion() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]);
        let c = characteristic_polynomial(&a);
        assert!((c[0] - 2.0).abs() < 1e-14 && (c[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rank_of_double_integrator_pair() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        assert_eq!(rank(&controllability_matrix(&a, &b)), 2);
        let b = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        assert_eq!(rank(&controllability_matrix(&a, &b)), 1);
    }
}
