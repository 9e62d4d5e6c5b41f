//! Finite-time stabilization of linear time-invariant systems `x' = Ax + Bu`.
//!
//! Two laws are provided. With a square, invertible `B` the state feedback
//! `u = K1 x - B^-1 x_alpha` turns the closed loop into
//! `x' = (A + B K1) x - x_alpha`, which reaches the origin in finite time
//! whenever `A + B K1` is Hurwitz. For single-input systems in controllable
//! canonical form, [`canonical`] builds a recursive chain of desired states
//! that drives `x` to `[x1d, 0, ..., 0]`.

pub mod canonical;
pub mod linalg;

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::math::{norm, pow, sig};
use crate::sim::VectorField;

pub use canonical::{
    auto_gains, canonical_control, composite_lyapunov, desired_chain, gain_threshold,
    min_global_gain, CanonicalGains, CanonicalLoop, DesiredChain,
};

/// `x |x|^(alpha-1)`, extended by 0 at the origin. For `n = 1` this is
/// `sign(x)|x|^alpha`.
pub fn x_alpha(x: &[f64], alpha: f64) -> Vec<f64> {
    let r = norm(x);
    if r == 0.0 {
        return alloc::vec![0.0; x.len()];
    }
    let s = pow(r, alpha - 1.0);
    x.iter().map(|v| v * s).collect()
}

/// `x' = A x + B u` with dense matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.nrows(),
            });
        }
        if n == 0 || b.ncols() == 0 {
            return Err(invalid("A", "system must have at least one state and input"));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("A", "entries must be finite"));
        }
        Ok(Self { a, b })
    }

    /// Builds the system from row-major entries; the input count is inferred
    /// from the length of `b`.
    pub fn from_row_major(n: usize, a: &[f64], b: &[f64]) -> Result<Self> {
        if n == 0 || a.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: a.len(),
            });
        }
        if b.is_empty() || !b.len().is_multiple_of(n) {
            return Err(invalid("B", "length must be a multiple of the state dimension"));
        }
        let m = b.len() / n;
        Self::new(
            DMatrix::from_row_slice(n, n, a),
            DMatrix::from_row_slice(n, m, b),
        )
    }

    /// Companion form with last row `a = [a_1, ..., a_n]` and `B = e_n`.
    pub fn canonical(coefficients: &[f64]) -> Result<Self> {
        let n = coefficients.len();
        if n == 0 {
            return Err(invalid("a", "need at least one coefficient"));
        }
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = 1.0;
        }
        for (j, &c) in coefficients.iter().enumerate() {
            a[(n - 1, j)] = c;
        }
        let mut b = DMatrix::zeros(n, 1);
        b[(n - 1, 0)] = 1.0;
        Self::new(a, b)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    /// Last-row coefficients when the system is in companion form with `B = e_n`.
    pub fn canonical_coefficients(&self) -> Option<Vec<f64>> {
        let n = self.n();
        if self.m() != 1 {
            return None;
        }
        for i in 0..n {
            let expected_b = if i == n - 1 { 1.0 } else { 0.0 };
            if self.b[(i, 0)] != expected_b {
                return None;
            }
            if i == n - 1 {
                break;
            }
            for j in 0..n {
                let expected = if j == i + 1 { 1.0 } else { 0.0 };
                if self.a[(i, j)] != expected {
                    return None;
                }
            }
        }
        Some((0..n).map(|j| self.a[(n - 1, j)]).collect())
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_coefficients().is_some()
    }

    pub fn is_controllable(&self) -> bool {
        linalg::rank(&linalg::controllability_matrix(&self.a, &self.b)) == self.n()
    }

    fn check_state(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.n() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            })
        }
    }

    /// `A x + B u`.
    pub fn derivative(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let dx = &self.a * DVector::from_column_slice(x) + &self.b * DVector::from_column_slice(u);
        dx.as_slice().to_vec()
    }
}

/// Gains and Lyapunov data certifying that `A + B K1` is Hurwitz.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovCertificate {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub k1: DMatrix<f64>,
    /// `-B^-1`, the gain on `x_alpha`.
    pub k2: DMatrix<f64>,
    /// Frobenius norm of `(A + B K1)^T P + P (A + B K1) + Q`.
    pub residual: f64,
    /// Largest real part of the eigenvalues of `A + B K1`.
    pub spectral_abscissa: f64,
    pub lambda_min_p: f64,
    pub lambda_max_p: f64,
}

impl LyapunovCertificate {
    /// `(c, beta)` with `V' + c V^beta <= 0` for `V = x^T P x`:
    /// `c = 2 lambda_min(P) / lambda_max(P)^beta`, `beta = (1 + alpha) / 2`.
    pub fn decrement_constants(&self, alpha: f64) -> (f64, f64) {
        let beta = 0.5 * (1.0 + alpha);
        (2.0 * self.lambda_min_p / pow(self.lambda_max_p, beta), beta)
    }

    pub fn lyapunov_value(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        v.dot(&(&self.p * &v))
    }
}

/// Certificate residual above which [`make_hurwitz_gain`] rejects the system.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-8;

/// `K1 = B^-1 (-I - A)` so that `A + B K1 = -I`, with `P` solving the
/// Lyapunov equation for `Q = 2I`.
pub fn make_hurwitz_gain(sys: &LinearSystem) -> Result<LyapunovCertificate> {
    let n = sys.n();
    if sys.m() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sys.m(),
        });
    }
    let r = linalg::rank(&sys.b);
    if r < n {
        return Err(Error::RankDeficient { rank: r, required: n });
    }
    let b_inv = sys
        .b
        .clone()
        .try_inverse()
        .ok_or(Error::RankDeficient { rank: r, required: n })?;
    let eye = DMatrix::<f64>::identity(n, n);
    let k1 = &b_inv * (-&eye - &sys.a);
    let closed = &sys.a + &sys.b * &k1;
    let q = &eye * 2.0;
    let p = linalg::solve_lyapunov(&closed, &q)?;
    let residual = linalg::lyapunov_residual(&closed, &p, &q);
    let eig = p.clone().symmetric_eigen().eigenvalues;
    let lambda_min_p = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let lambda_max_p = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cert = LyapunovCertificate {
        k2: -b_inv,
        spectral_abscissa: linalg::spectral_abscissa(&closed),
        p,
        q,
        k1,
        residual,
        lambda_min_p,
        lambda_max_p,
    };
    if !(cert.residual < CERTIFICATE_TOLERANCE && cert.lambda_min_p > 0.0 && cert.spectral_abscissa < 0.0)
    {
        return Err(invalid("B", "too ill-conditioned for a reliable certificate"));
    }
    Ok(cert)
}

/// `u = K1 x + K2 x_alpha`.
pub fn full_rank_control(
    sys: &LinearSystem,
    cert: &LyapunovCertificate,
    x: &[f64],
    alpha: f64,
) -> Result<Vec<f64>> {
    sys.check_state(x)?;
    if cert.k1.shape() != (sys.m(), sys.n()) {
        return Err(Error::DimensionMismatch {
            expected: sys.m(),
            found: cert.k1.nrows(),
        });
    }
    let xv = DVector::from_column_slice(x);
    let xa = DVector::from_vec(x_alpha(x, alpha));
    let u = &cert.k1 * xv + &cert.k2 * xa;
    Ok(u.as_slice().to_vec())
}

/// `u = (-a x - k sign(e)|e|^alpha + xd') / b` with `e = x - xd`.
pub fn scalar_tracking_control(
    a: f64,
    b: f64,
    x: f64,
    xd: f64,
    xd_dot: f64,
    k: f64,
    alpha: f64,
) -> Result<f64> {
    if b == 0.0 {
        return Err(Error::NotControllable);
    }
    Ok((-a * x - k * sig(x - xd, alpha) + xd_dot) / b)
}

/// Similarity transform `z = T x` taking a controllable single-input pair to
/// companion form, so that `T A T^-1 = A_c` and `T b = e_n`.
pub fn to_canonical(sys: &LinearSystem) -> Result<(LinearSystem, DMatrix<f64>)> {
    if sys.m() != 1 {
        return Err(invalid("B", "canonical form needs a single input"));
    }
    let n = sys.n();
    let ctrb = linalg::controllability_matrix(&sys.a, &sys.b);
    if linalg::rank(&ctrb) < n {
        return Err(Error::NotControllable);
    }
    let coeffs: Vec<f64> = linalg::characteristic_polynomial(&sys.a)
        .iter()
        .map(|c| -c)
        .collect();
    let canonical = LinearSystem::canonical(&coeffs)?;
    let ctrb_c = linalg::controllability_matrix(&canonical.a, &canonical.b);
    let ctrb_inv = ctrb.try_inverse().ok_or(Error::NotControllable)?;
    Ok((canonical, ctrb_c * ctrb_inv))
}

/// Closed loop of the full-rank law.
#[derive(Debug, Clone)]
pub struct FullRankLoop {
    pub sys: LinearSystem,
    pub cert: LyapunovCertificate,
    pub alpha: f64,
}

impl FullRankLoop {
    pub fn new(sys: LinearSystem, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", "must lie in (0, 1)"));
        }
        let cert = make_hurwitz_gain(&sys)?;
        Ok(Self { sys, cert, alpha })
    }
}

impl VectorField for FullRankLoop {
    fn dim(&self) -> usize {
        self.sys.n()
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        let u = full_rank_control(&self.sys, &self.cert, x, self.alpha)?;
        dx.copy_from_slice(&self.sys.derivative(x, &u));
        Ok(())
    }

    fn control_dim(&self) -> usize {
        self.sys.m()
    }

    fn control(&self, _t: f64, x: &[f64], u: &mut [f64]) -> Result<()> {
        u.copy_from_slice(&full_rank_control(&self.sys, &self.cert, x, self.alpha)?);
        Ok(())
    }

    fn non_lipschitz(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn x_alpha_examples() {
        assert_eq!(x_alpha(&[0.0, 0.0], 0.5), vec![0.0, 0.0]);
        let v = x_alpha(&[3.0, 4.0], 0.5);
        assert!((v[0] - 3.0 / sqrt(5.0)).abs() < 1e-15);
        assert!((v[1] - 4.0 / sqrt(5.0)).abs() < 1e-15);
        assert!((x_alpha(&[-8.0], 1.0 / 3.0)[0] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn identity_input_gain() {
        let sys = LinearSystem::new(DMatrix::zeros(2, 2), DMatrix::identity(2, 2)).unwrap();
        let cert = make_hurwitz_gain(&sys).unwrap();
        assert!((&cert.k1 + DMatrix::<f64>::identity(2, 2)).norm() < 1e-15);
        assert!((&cert.p - DMatrix::<f64>::identity(2, 2)).norm() < 1e-14);
        assert!((&cert.q - DMatrix::<f64>::identity(2, 2) * 2.0).norm() == 0.0);
    }

    #[test]
    fn double_integrator_gain() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let sys = LinearSystem::new(a.clone(), DMatrix::identity(2, 2)).unwrap();
        let cert = make_hurwitz_gain(&sys).unwrap();
        assert!((&cert.k1 - (-DMatrix::<f64>::identity(2, 2) - a)).norm() < 1e-15);
        for z in (&sys.a + &sys.b * &cert.k1).complex_eigenvalues().iter() {
            assert!((z.re + 1.0).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn singular_input_matrix_is_rejected() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let sys = LinearSystem::new(DMatrix::zeros(2, 2), b).unwrap();
        assert!(matches!(
            make_hurwitz_gain(&sys),
            Err(Error::RankDeficient { rank: 1, required: 2 })
        ));
    }

    #[test]
    fn full_rank_control_examples() {
        let sys = LinearSystem::new(DMatrix::zeros(2, 2), DMatrix::identity(2, 2)).unwrap();
        let cert = make_hurwitz_gain(&sys).unwrap();
        assert_eq!(full_rank_control(&sys, &cert, &[0.0, 0.0], 0.5).unwrap(), vec![0.0, 0.0]);
        let u = full_rank_control(&sys, &cert, &[3.0, 4.0], 0.5).unwrap();
        let s = sqrt(5.0);
        assert!((u[0] - (-3.0 - 3.0 / s)).abs() < 1e-14);
        assert!((u[1] - (-4.0 - 4.0 / s)).abs() < 1e-14);
    }

    #[test]
    fn closed_loop_is_minus_x_minus_x_alpha() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(2..=4);
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let b = DMatrix::<f64>::identity(n, n) + DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3));
            let sys = LinearSystem::new(a, b).unwrap();
            let cert = make_hurwitz_gain(&sys).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let u = full_rank_control(&sys, &cert, &x, 0.6).unwrap();
            let dx = sys.derivative(&x, &u);
            let xa = x_alpha(&x, 0.6);
            for i in 0..n {
                assert!((dx[i] - (-x[i] - xa[i])).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn scalar_tracking_examples() {
        assert_eq!(scalar_tracking_control(0.0, 1.0, 2.0, 2.0, 0.0, 1.0, 0.5).unwrap(), 0.0);
        let u = scalar_tracking_control(1.0, 2.0, 3.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        assert!((u - (-3.0 - sqrt(2.0)) / 2.0).abs() < 1e-15);
        assert!(matches!(
            scalar_tracking_control(1.0, 0.0, 3.0, 1.0, 0.0, 1.0, 0.5),
            Err(Error::NotControllable)
        ));
    }

    #[test]
    fn canonical_system_maps_to_itself() {
        let sys = LinearSystem::canonical(&[-2.0, -3.0]).unwrap();
        let (c, t) = to_canonical(&sys).unwrap();
        assert_eq!(c.canonical_coefficients().unwrap(), vec![-2.0, -3.0]);
        assert!((t - DMatrix::<f64>::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn uncontrollable_pair_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let b = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let sys = LinearSystem::new(a, b).unwrap();
        assert!(matches!(to_canonical(&sys), Err(Error::NotControllable)));
        assert!(!sys.is_controllable());
    }

    proptest! {
        #[test]
        fn canonical_round_trip(
            n in 2usize..=4,
            seed in any::<u64>(),
        ) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let b = DMatrix::from_fn(n, 1, |_, _| rng.gen_range(-1.0..1.0));
            let sys = LinearSystem::new(a, b).unwrap();
            let ctrb = linalg::controllability_matrix(&sys.a, &sys.b);
            let sv = ctrb.svd(false, false).singular_values;
            let cond = sv.max() / sv.min();
            prop_assume!(cond < 1e4);
            let (c, t) = to_canonical(&sys).unwrap();
            let t_inv = t.clone().try_inverse().unwrap();
            // similarity round trips lose about kappa(T)^2 ulps
            let st = t.clone().svd(false, false).singular_values;
            let tol = 1e-12 * (1.0 + (st.max() / st.min()).powi(2));
            prop_assert!((&t_inv * &c.a * &t - &sys.a).norm() < tol);
            prop_assert!((&t * &sys.b - &c.b).norm() < tol);
        }

        #[test]
        fn x_alpha_aligns_with_x(v in proptest::collection::vec(-10.0f64..10.0, 1..6), alpha in 0.05f64..0.95) {
            let r = norm(&v);
            prop_assume!(r > 1e-6);
            let xa = x_alpha(&v, alpha);
            let inner: f64 = v.iter().zip(&xa).map(|(a, b)| a * b).sum();
            prop_assert!(inner > 0.0);
            prop_assert!((inner - pow(r, 1.0 + alpha)).abs() <= 1e-10 * pow(r, 1.0 + alpha));
        }

        #[test]
        fn certificate_residual_small(n in 2usize..=4, seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let b = DMatrix::<f64>::identity(n, n) + DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.4..0.4));
            let sys = LinearSystem::new(a, b).unwrap();
            let cert = make_hurwitz_gain(&sys).unwrap();
            prop_assert!(cert.residual < 1e-8);
            prop_assert!(cert.spectral_abscissa < -0.99);
        }
    }
}
