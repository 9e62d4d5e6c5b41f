//! Obstacle avoidance for the single integrator `x' = u` with one circular
//! obstacle.
//!
//! The barrier `B(x) = |x - tau|^2 / (|x - o| - d_c + 1/eps)` vanishes only at
//! the goal and grows without bound as `x` approaches the safety circle
//! `|x - o| = d_c - 1/eps`. Following `u = -k1 grad B |grad B|^(alpha-1)` makes
//! `B` decrease to zero in finite time. The gradient also vanishes at one
//! point behind the obstacle, on the ray from the goal through the obstacle
//! center; starts on that ray are excluded.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{dist, dot, norm, pow};
use crate::sim::{Trajectory, VectorField};

/// Default regularization of `|grad B|^(alpha-1)`.
pub const GRADIENT_REGULARIZATION: f64 = 1e-9;
/// Default exclusion-ray thickness as a fraction of `|o - tau|`.
pub const RAY_THICKNESS_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierParams {
    pub tau: Vec<f64>,
    pub o: Vec<f64>,
    pub rho_o: f64,
    pub d_m: f64,
    pub epsilon: f64,
    pub k1: f64,
    pub alpha: f64,
    pub delta: f64,
    /// Exclusion-ray thickness; `None` uses [`RAY_THICKNESS_FRACTION`].
    pub ray_thickness: Option<f64>,
}

impl BarrierParams {
    pub fn new(
        tau: Vec<f64>,
        o: Vec<f64>,
        rho_o: f64,
        d_m: f64,
        epsilon: f64,
        k1: f64,
        alpha: f64,
    ) -> Result<Self> {
        let p = Self {
            tau,
            o,
            rho_o,
            d_m,
            epsilon,
            k1,
            alpha,
            delta: GRADIENT_REGULARIZATION,
            ray_thickness: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// `d_c = d_m + rho_o`.
    pub fn d_c(&self) -> f64 {
        self.d_m + self.rho_o
    }

    pub fn dim(&self) -> usize {
        self.tau.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau.is_empty() || self.tau.len() != self.o.len() {
            return Err(Error::DimensionMismatch {
                expected: self.tau.len(),
                found: self.o.len(),
            });
        }
        if self.tau.iter().chain(&self.o).any(|v| !v.is_finite()) {
            return Err(invalid("tau", "goal and obstacle must be finite"));
        }
        if !(self.rho_o >= 0.0) || !(self.d_m >= 0.0) || !(self.d_c() > 0.0) {
            return Err(invalid("d_c", "radius and margin must be non-negative with d_c > 0"));
        }
        let sep = dist(&self.o, &self.tau);
        if !(sep > 2.0 * self.d_c()) {
            return Err(invalid(
                "o",
                format!("|o - tau| = {sep} must exceed 2 d_c = {}", 2.0 * self.d_c()),
            ));
        }
        if !(self.epsilon >= 100.0) || !self.epsilon.is_finite() {
            return Err(invalid("epsilon", "must be finite and at least 100"));
        }
        if !(self.k1 > 0.0) || !self.k1.is_finite() {
            return Err(invalid("k1", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha", "must lie in (0, 1)"));
        }
        if !(self.delta >= 0.0) {
            return Err(invalid("delta", "must be non-negative"));
        }
        if let Some(r) = self.ray_thickness {
            if !(r > 0.0) {
                return Err(invalid("ray_thickness", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn exclusion_ray(&self) -> ExclusionRay {
        let direction: Vec<f64> = self.o.iter().zip(&self.tau).map(|(o, t)| o - t).collect();
        let thickness = self
            .ray_thickness
            .unwrap_or_else(|| RAY_THICKNESS_FRACTION * norm(&direction));
        ExclusionRay {
            origin: self.tau.clone(),
            direction,
            thickness,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            })
        }
    }

    /// `x_o = |x - o| - d_c + 1/eps`, required positive.
    fn denominator(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(x)?;
        let xo = dist(x, &self.o);
        let den = xo - self.d_c() + 1.0 / self.epsilon;
        if den > 0.0 {
            Ok((xo, den))
        } else {
            Err(Error::SafetyViolated {
                distance: xo - self.d_c(),
            })
        }
    }
}

pub fn barrier_value(x: &[f64], p: &BarrierParams) -> Result<f64> {
    let (_, den) = p.denominator(x)?;
    let d = dist(x, &p.tau);
    Ok(d * d / den)
}

/// `grad B = 2(x - tau)/x_o - |x - tau|^2 / x_o^2 (x - o)/|x - o|`.
pub fn barrier_gradient(x: &[f64], p: &BarrierParams) -> Result<Vec<f64>> {
    let (xo, den) = p.denominator(x)?;
    if xo == 0.0 {
        return Err(Error::SingularPoint);
    }
    let d = dist(x, &p.tau);
    let w = d * d / (den * den * xo);
    Ok(x
        .iter()
        .zip(&p.tau)
        .zip(&p.o)
        .map(|((xi, ti), oi)| 2.0 * (xi - ti) / den - w * (xi - oi))
        .collect())
}

/// The non-goal critical point `tau + 2 (|o - tau| + d_c - 1/eps)/|o - tau| (o - tau)`.
pub fn degenerate_point(p: &BarrierParams) -> Vec<f64> {
    let sep = dist(&p.o, &p.tau);
    let theta = 2.0 * (sep + p.d_c() - 1.0 / p.epsilon) / sep;
    p.tau
        .iter()
        .zip(&p.o)
        .map(|(t, o)| t + theta * (o - t))
        .collect()
}

/// `u = -k1 grad B |grad B|^(alpha-1)`, with `|grad B|` floored at `delta`
/// inside the power and `u = 0` where the gradient vanishes.
pub fn control(x: &[f64], p: &BarrierParams) -> Result<Vec<f64>> {
    let g = barrier_gradient(x, p)?;
    let n = norm(&g);
    if n == 0.0 {
        return Ok(alloc::vec![0.0; g.len()]);
    }
    let s = -p.k1 * pow(n.max(p.delta), p.alpha - 1.0);
    Ok(g.iter().map(|v| s * v).collect())
}

/// `{x : dist(x, {tau + theta (o - tau), theta >= 1}) < thickness}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionRay {
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
    pub thickness: f64,
}

impl ExclusionRay {
    pub fn distance(&self, x: &[f64]) -> f64 {
        let rel: Vec<f64> = x.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        let theta = (dot(&rel, &self.direction) / dot(&self.direction, &self.direction)).max(1.0);
        let closest: Vec<f64> = self
            .origin
            .iter()
            .zip(&self.direction)
            .map(|(o, d)| o + theta * d)
            .collect();
        dist(x, &closest)
    }
}

pub fn in_exclusion_ray(x: &[f64], ray: &ExclusionRay) -> bool {
    ray.distance(x) < ray.thickness
}

/// `min_t |x(t) - o| - d_c`; positive infinity for an empty trajectory.
pub fn safety_margin(traj: &Trajectory, p: &BarrierParams) -> f64 {
    traj.iter()
        .map(|(_, x, _)| dist(x, &p.o) - p.d_c())
        .fold(f64::INFINITY, f64::min)
}

/// `x' = u(x)`; the control is recorded alongside the state.
#[derive(Debug, Clone)]
pub struct BarrierLoop {
    pub params: BarrierParams,
}

impl BarrierLoop {
    pub fn new(params: BarrierParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    /// Rejects starts inside the safety circle or on the exclusion ray.
    pub fn check_initial(&self, x0: &[f64]) -> Result<()> {
        self.params.check_dim(x0)?;
        let margin = dist(x0, &self.params.o) - self.params.d_c();
        if margin < 0.0 {
            return Err(Error::SafetyViolated { distance: margin });
        }
        let ray = self.params.exclusion_ray();
        if in_exclusion_ray(x0, &ray) {
            return Err(invalid(
                "x0",
                format!(
                    "lies on the exclusion ray (distance {} < {})",
                    ray.distance(x0),
                    ray.thickness
                ),
            ));
        }
        Ok(())
    }
}

impl VectorField for BarrierLoop {
    fn dim(&self) -> usize {
        self.params.dim()
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        dx.copy_from_slice(&control(x, &self.params)?);
        Ok(())
    }

    fn control_dim(&self) -> usize {
        self.params.dim()
    }

    fn control(&self, _t: f64, x: &[f64], u: &mut [f64]) -> Result<()> {
        u.copy_from_slice(&control(x, &self.params)?);
        Ok(())
    }

    fn non_lipschitz(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario() -> BarrierParams {
        BarrierParams::new(vec![10.0, 20.0], vec![4.0, 6.0], 1.0, 1.0, 1000.0, 1.0, 0.5).unwrap()
    }

    fn safe_samples(p: &BarrierParams, count: usize, seed: u64, ray_scale: f64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ray = p.exclusion_ray();
        ray.thickness *= ray_scale;
        let mut out = Vec::new();
        while out.len() < count {
            let x = vec![rng.gen_range(-10.0..30.0), rng.gen_range(-10.0..30.0)];
            if dist(&x, &p.o) > p.d_c() + 0.05 && !in_exclusion_ray(&x, &ray) && dist(&x, &p.tau) > 1e-3 {
                out.push(x);
            }
        }
        out
    }

    #[test]
    fn value_examples() {
        let p = scenario();
        assert_eq!(barrier_value(&p.tau, &p).unwrap(), 0.0);
        let b = barrier_value(&[0.0, 0.0], &p).unwrap();
        let want = 500.0 / (52f64.sqrt() - 2.0 + 0.001);
        assert!((b - want).abs() < 1e-12);
        assert!((b - 95.93).abs() < 5e-3);
        // |x - o| = d_c + 1
        let x = [4.0 + 3.0, 6.0];
        let d = dist(&x, &p.tau);
        assert!((barrier_value(&x, &p).unwrap() - d * d / (1.0 + 1e-3)).abs() < 1e-12);
    }

    #[test]
    fn inside_safety_circle_is_rejected() {
        let p = scenario();
        assert!(matches!(barrier_value(&[4.0, 6.5], &p), Err(Error::SafetyViolated { .. })));
        assert!(barrier_gradient(&[4.0, 6.0], &p).is_err());
    }

    #[test]
    fn degenerate_point_examples() {
        let mut p = BarrierParams::new(vec![0.0, 0.0], vec![5.0, 0.0], 1.0, 1.0, 1e300, 1.0, 0.5).unwrap();
        let x = degenerate_point(&p);
        assert!((x[0] - 14.0).abs() < 1e-12 && x[1] == 0.0);
        p.o = vec![0.0, 5.0];
        p.epsilon = 1000.0;
        let x = degenerate_point(&p);
        assert!(x[0] == 0.0 && (x[1] - 13.998).abs() < 1e-12);
        assert!(norm(&barrier_gradient(&x, &p).unwrap()) < 1e-8);
        assert!(in_exclusion_ray(&x, &p.exclusion_ray()));
        let q = scenario();
        let xq = degenerate_point(&q);
        assert!(norm(&barrier_gradient(&xq, &q).unwrap()) < 1e-8);
    }

    #[test]
    fn exclusion_ray_membership() {
        let p = scenario();
        let ray = p.exclusion_ray();
        assert!(in_exclusion_ray(&p.o, &ray));
        assert!(!in_exclusion_ray(&p.tau, &ray));
        assert!(!in_exclusion_ray(&[0.0, 0.0], &ray));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = scenario();
        assert_eq!(barrier_gradient(&p.tau, &p).unwrap(), vec![0.0, 0.0]);
        let h = 1e-6;
        for x in safe_samples(&p, 100, 7, 1.0) {
            let g = barrier_gradient(&x, &p).unwrap();
            let mut fd = [0.0; 2];
            for i in 0..2 {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[i] += h;
                xm[i] -= h;
                fd[i] = (barrier_value(&xp, &p).unwrap() - barrier_value(&xm, &p).unwrap()) / (2.0 * h);
            }
            let err = dist(&g, &fd) / norm(&g).max(1e-300);
            assert!(err < 1e-5, "x = {x:?}: relative error {err}");
        }
    }

    #[test]
    fn control_examples() {
        let p = scenario();
        assert_eq!(control(&p.tau, &p).unwrap(), vec![0.0, 0.0]);
        let g = barrier_gradient(&[0.0, 0.0], &p).unwrap();
        let u = control(&[0.0, 0.0], &p).unwrap();
        let n = norm(&g);
        for i in 0..2 {
            assert!((u[i] + g[i] / n.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn barrier_bounded_by_scaled_distance() {
        let p = scenario();
        for x in safe_samples(&p, 500, 11, 1.0) {
            let d = dist(&x, &p.tau);
            assert!(barrier_value(&x, &p).unwrap() <= p.epsilon * d * d);
        }
    }

    #[test]
    fn gradient_is_bounded_below_off_the_ray() {
        let p = scenario();
        let ratio = |x: &[f64]| norm(&barrier_gradient(x, &p).unwrap()) / dist(x, &p.tau);
        // the ratio is smallest far from the obstacle, so the recording grid covers the box edges
        let mut c = f64::INFINITY;
        let mut ray = p.exclusion_ray();
        for i in 0..=200 {
            for j in 0..=200 {
                let x = [-10.0 + 0.2 * i as f64, -10.0 + 0.2 * j as f64];
                if dist(&x, &p.o) > p.d_c() + 0.05 && !in_exclusion_ray(&x, &ray) && dist(&x, &p.tau) > 1e-3 {
                    c = c.min(ratio(&x));
                }
            }
        }
        ray.thickness *= 2.0;
        assert!(!in_exclusion_ray(&[0.0, 0.0], &ray));
        assert!(c > 0.0);
        // fresh points kept twice as far from the ray
        for x in safe_samples(&p, 1000, 4, 2.0) {
            assert!(ratio(&x) >= c, "x = {x:?}");
        }
    }

    #[test]
    fn margin_of_simple_paths() {
        let p = scenario();
        let mut still = Trajectory::new(2, 0);
        still.push(0.0, &p.tau, &[]).unwrap();
        still.push(1.0, &p.tau, &[]).unwrap();
        assert!((safety_margin(&still, &p) - (dist(&p.tau, &p.o) - 2.0)).abs() < 1e-12);
        let mut through = Trajectory::new(2, 0);
        through.push(0.0, &[0.0, 6.0], &[]).unwrap();
        through.push(1.0, &[4.0, 6.0], &[]).unwrap();
        through.push(2.0, &[8.0, 6.0], &[]).unwrap();
        assert_eq!(safety_margin(&through, &p), -2.0);
    }

    #[test]
    fn params_are_validated() {
        assert!(BarrierParams::new(vec![0.0, 0.0], vec![3.0, 0.0], 1.0, 1.0, 1000.0, 1.0, 0.5).is_err());
        assert!(BarrierParams::new(vec![0.0, 0.0], vec![9.0, 0.0], 1.0, 1.0, 10.0, 1.0, 0.5).is_err());
        assert!(BarrierParams::new(vec![0.0, 0.0], vec![9.0, 0.0], 0.0, 0.0, 1000.0, 1.0, 0.5).is_err());
        assert!(BarrierParams::new(vec![0.0], vec![9.0, 0.0], 1.0, 1.0, 1000.0, 1.0, 0.5).is_err());
        let lp = BarrierLoop::new(scenario()).unwrap();
        assert!(lp.check_initial(&[0.0, 0.0]).is_ok());
        let behind = degenerate_point(&lp.params);
        assert!(lp.check_initial(&behind).is_err());
        assert!(lp.check_initial(&[4.0, 6.5]).is_err());
    }
}
