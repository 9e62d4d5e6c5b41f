//! Recursive finite-time law for single-input systems in controllable
//! canonical form.
//!
//! With `e_i = x_i - xd_i` the desired states are
//! `xd_(i+1) = -k_i sign(e_i)|e_i|^alpha + xd_i'`, starting from a constant
//! `xd_1`, and the input `u = xd_n' - sum a_i x_i - k_n sign(e_n)|e_n|^alpha`
//! closes the chain. Every `xd_i'` needs higher time derivatives of the
//! earlier desired states; these are carried exactly with truncated Taylor
//! series ([`Jet`]) since `x_i^(j) = x_(i+j)` along the integrator chain.
//! Near `e_i = 0` the negative powers `|e_i|^(alpha - m)` are evaluated at the
//! regularization radius `delta`.

use alloc::vec::Vec;

use super::LinearSystem;
use crate::error::{invalid, Error, Result};
use crate::jet::Jet;
use crate::math::{abs, pow, sig, sign};
use crate::sim::VectorField;

/// Gains `k_1..k_n`, exponent `alpha` in `((n-1)/n, 1)` and regularization.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalGains {
    k: Vec<f64>,
    alpha: f64,
    delta: f64,
}

impl CanonicalGains {
    pub fn new(k: Vec<f64>, alpha: f64, delta: f64) -> Result<Self> {
        let n = k.len();
        if n == 0 {
            return Err(invalid("k", "need one gain per state"));
        }
        if k.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(invalid("k", "gains must be positive and finite"));
        }
        let lower = (n as f64 - 1.0) / n as f64;
        if !(alpha > lower && alpha < 1.0) {
            return Err(invalid("alpha", alloc::format!("must lie in ({lower}, 1) for n = {n}")));
        }
        if !(delta >= 0.0) {
            return Err(invalid("delta", "must be non-negative"));
        }
        Ok(Self { k, alpha, delta })
    }

    pub fn uniform(n: usize, k: f64, alpha: f64, delta: f64) -> Result<Self> {
        Self::new(alloc::vec![k; n], alpha, delta)
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }
}

/// Desired states `xd_1..xd_n` and their first time derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredChain {
    pub xd: Vec<f64>,
    pub xd_dot: Vec<f64>,
    /// Some `|e_i| < delta`, so regularized powers were used.
    pub regularized: bool,
}

impl DesiredChain {
    pub fn xd_dot_n(&self) -> f64 {
        *self.xd_dot.last().expect("chain is non-empty")
    }
}

/// Derivatives `f^(m)(e)`, `m = 0..=order`, of `f(e) = sign(e)|e|^alpha`,
/// with `|e|` replaced by `max(|e|, delta)` for `m >= 1`.
fn sig_derivatives(e: f64, alpha: f64, delta: f64, order: usize) -> Vec<f64> {
    let r = abs(e).max(delta);
    let s = sign(e);
    let mut out = Vec::with_capacity(order + 1);
    out.push(sig(e, alpha));
    let mut falling = 1.0;
    for m in 1..=order {
        falling *= alpha - (m as f64 - 1.0);
        let parity = if m % 2 == 1 { 1.0 } else { s };
        out.push(falling * pow(r, alpha - m as f64) * parity);
    }
    out
}

/// Evaluates the desired chain at state `x` for target `x1d`.
pub fn desired_chain(x: &[f64], x1d: f64, gains: &CanonicalGains) -> Result<DesiredChain> {
    let n = x.len();
    if n == 0 {
        return Err(invalid("x", "state must be non-empty"));
    }
    if gains.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gains.n(),
        });
    }
    let alpha = gains.alpha;
    let delta = gains.delta;
    let mut regularized = false;
    let mut xd = Vec::with_capacity(n);
    let mut xd_dot = Vec::with_capacity(n);

    // xd_i is needed to order n - i + 1 so that xd_n' exists at the end.
    let mut current = Jet::constant(x1d, n);
    xd.push(x1d);
    xd_dot.push(0.0);
    for i in 0..n - 1 {
        // x_(i+1) in 1-based terms: derivatives come from the integrator chain.
        let x_jet = Jet::from_derivatives(&x[i..]);
        let e = x_jet.sub(&current);
        if abs(e.value()) < delta {
            regularized = true;
        }
        let f = e.compose(&sig_derivatives(e.value(), alpha, delta, e.order()));
        let next = f.scale(-gains.k[i]).add(&current.differentiate());
        if !next.is_finite() {
            return Err(Error::ChainOverflow { depth: i + 1 });
        }
        xd.push(next.value());
        xd_dot.push(next.derivative(1));
        current = next;
    }
    Ok(DesiredChain {
        xd,
        xd_dot,
        regularized,
    })
}

/// `u = xd_n' - sum a_i x_i - k_n sign(e_n)|e_n|^alpha`.
pub fn canonical_control(
    sys: &LinearSystem,
    x: &[f64],
    x1d: f64,
    gains: &CanonicalGains,
) -> Result<f64> {
    let a = sys
        .canonical_coefficients()
        .ok_or_else(|| invalid("A", "system is not in controllable canonical form"))?;
    Ok(control_from_chain(&a, x, &desired_chain(x, x1d, gains)?, gains))
}

fn control_from_chain(a: &[f64], x: &[f64], chain: &DesiredChain, gains: &CanonicalGains) -> f64 {
    let n = x.len();
    let drift: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
    chain.xd_dot_n() - drift - gains.k[n - 1] * sig(x[n - 1] - chain.xd[n - 1], gains.alpha)
}

/// `V = sum (x_i - xd_i)^2 / 2`.
pub fn composite_lyapunov(x: &[f64], chain: &DesiredChain) -> f64 {
    x.iter()
        .zip(&chain.xd)
        .map(|(xi, di)| 0.5 * (xi - di) * (xi - di))
        .sum()
}

/// `V0^(1-alpha) / 2^beta` with `beta = (1 + alpha) / 2`: gains strictly above
/// this place the initial condition inside the finite-time attraction domain.
pub fn gain_threshold(v0: f64, alpha: f64) -> f64 {
    pow(v0, 1.0 - alpha) / pow(2.0, 0.5 * (1.0 + alpha))
}

/// Gain threshold for `x0`, with `V(x0)` evaluated on the chain built from
/// `gains`.
pub fn min_global_gain(x0: &[f64], x1d: f64, gains: &CanonicalGains) -> Result<f64> {
    let chain = desired_chain(x0, x1d, gains)?;
    Ok(gain_threshold(composite_lyapunov(x0, &chain), gains.alpha))
}

const AUTO_GAIN_ITERATIONS: usize = 200;

/// Uniform gains `k = factor * min_global_gain(x0; k)`.
///
/// The threshold depends on the gains through the chain, so the uniform gain
/// is the fixed point of that map, found by iteration from `k = 1`. When `x0`
/// already sits on the target every positive gain qualifies and `k = 1`.
pub fn auto_gains(
    x0: &[f64],
    x1d: f64,
    alpha: f64,
    factor: f64,
    delta: f64,
) -> Result<CanonicalGains> {
    if !(factor > 1.0) {
        return Err(invalid("factor", "must exceed 1"));
    }
    let n = x0.len();
    let mut k = 1.0;
    for _ in 0..AUTO_GAIN_ITERATIONS {
        let gains = CanonicalGains::uniform(n, k, alpha, delta)?;
        let threshold = min_global_gain(x0, x1d, &gains)?;
        if threshold == 0.0 {
            return Ok(gains);
        }
        let next = factor * threshold;
        if !next.is_finite() || next < 1e-12 {
            break;
        }
        if abs(next - k) <= 1e-12 * k {
            return CanonicalGains::uniform(n, next, alpha, delta);
        }
        k = next;
    }
    Err(Error::NoConvergence {
        iterations: AUTO_GAIN_ITERATIONS,
    })
}

/// Closed loop of the canonical law; input is recorded as a 1-vector.
#[derive(Debug, Clone)]
pub struct CanonicalLoop {
    sys: LinearSystem,
    coefficients: Vec<f64>,
    pub x1d: f64,
    pub gains: CanonicalGains,
}

impl CanonicalLoop {
    pub fn new(sys: LinearSystem, x1d: f64, gains: CanonicalGains) -> Result<Self> {
        let coefficients = sys
            .canonical_coefficients()
            .ok_or_else(|| invalid("A", "system is not in controllable canonical form"))?;
        if gains.n() != sys.n() {
            return Err(Error::DimensionMismatch {
                expected: sys.n(),
                found: gains.n(),
            });
        }
        Ok(Self {
            sys,
            coefficients,
            x1d,
            gains,
        })
    }

    pub fn system(&self) -> &LinearSystem {
        &self.sys
    }

    /// `[x1d, 0, ..., 0]`.
    pub fn target(&self) -> Vec<f64> {
        let mut t = alloc::vec![0.0; self.sys.n()];
        t[0] = self.x1d;
        t
    }

    pub fn chain(&self, x: &[f64]) -> Result<DesiredChain> {
        desired_chain(x, self.x1d, &self.gains)
    }

    pub fn input(&self, x: &[f64]) -> Result<f64> {
        let chain = self.chain(x)?;
        Ok(control_from_chain(&self.coefficients, x, &chain, &self.gains))
    }
}

impl VectorField for CanonicalLoop {
    fn dim(&self) -> usize {
        self.sys.n()
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        let u = self.input(x)?;
        let n = x.len();
        dx[..n - 1].copy_from_slice(&x[1..]);
        let drift: f64 = self.coefficients.iter().zip(x).map(|(a, xi)| a * xi).sum();
        dx[n - 1] = drift + u;
        Ok(())
    }

    fn control_dim(&self) -> usize {
        1
    }

    fn control(&self, _t: f64, x: &[f64], u: &mut [f64]) -> Result<()> {
        u[0] = self.input(x)?;
        Ok(())
    }

    fn non_lipschitz(&self) -> bool {
        true
    }
}
