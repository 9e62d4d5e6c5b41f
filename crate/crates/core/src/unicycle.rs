//! Trajectory tracking for the unicycle `x' = u cos(theta)`, `y' = u sin(theta)`,
//! `theta' = omega`.
//!
//! The guidance field `F_p = -k r_e |r_e|^(alpha-1) + r_g'` moves a point onto
//! the reference in finite time. The vehicle drives at speed `|F_p|` and turns
//! so that its heading reaches the field direction `phi_p` in finite time too.

use crate::error::{invalid, Error, Result};
use crate::math::{atan2, cos, dot, norm, pow, sig, sin, sqrt, wrap_angle};
use crate::reference::ReferenceTrajectory;
use crate::sim::VectorField;

/// Below this field magnitude the heading `phi_p` is undefined.
pub const DEGENERATE_FIELD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicycleGains {
    pub k: f64,
    pub k_omega: f64,
    pub alpha: f64,
    pub delta: f64,
}

impl UnicycleGains {
    pub fn new(k: f64, k_omega: f64, alpha: f64, delta: f64) -> Result<Self> {
        let g = Self {
            k,
            k_omega,
            alpha,
            delta,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(invalid("k", "must be positive"));
        }
        if !(self.k_omega > 0.0) || !self.k_omega.is_finite() {
            return Err(invalid("k_omega", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha", "must lie in (0, 1)"));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(invalid("delta", "must be non-negative"));
        }
        Ok(())
    }

    /// `(c, beta)` of the heading-error decrement `V' + c V^beta <= 0`.
    pub fn heading_decrement(&self) -> (f64, f64) {
        let beta = 0.5 * (1.0 + self.alpha);
        (self.k_omega * pow(2.0, beta), beta)
    }
}

impl Default for UnicycleGains {
    fn default() -> Self {
        Self {
            k: 1.0,
            k_omega: 2.0,
            alpha: 0.7,
            delta: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicycleState {
    pub r: [f64; 2],
    theta: f64,
}

impl UnicycleState {
    pub fn new(r: [f64; 2], theta: f64) -> Self {
        Self {
            r,
            theta: wrap_angle(theta),
        }
    }

    /// From `[x, y, theta]`.
    pub fn from_slice(q: &[f64]) -> Self {
        Self::new([q[0], q[1]], q[2])
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// `|r_e|^(alpha-1)` evaluated at `max(|r_e|, delta)`; 0 when `r_e = 0`.
fn regularized_scale(rho: f64, gains: &UnicycleGains) -> f64 {
    if rho == 0.0 {
        0.0
    } else {
        pow(rho.max(gains.delta), gains.alpha - 1.0)
    }
}

pub fn position_error(r: [f64; 2], t: f64, reference: &ReferenceTrajectory) -> [f64; 2] {
    let g = reference.position(t);
    [r[0] - g[0], r[1] - g[1]]
}

/// `F_p(r, t)`.
pub fn vector_field(
    r: [f64; 2],
    t: f64,
    reference: &ReferenceTrajectory,
    gains: &UnicycleGains,
) -> [f64; 2] {
    let re = position_error(r, t, reference);
    let s = gains.k * regularized_scale(norm(&re), gains);
    let v = reference.velocity(t);
    [v[0] - s * re[0], v[1] - s * re[1]]
}

fn field_heading(f: [f64; 2]) -> Result<f64> {
    let n = norm(&f);
    if n < DEGENERATE_FIELD {
        return Err(Error::DegenerateField { norm: n });
    }
    Ok(atan2(f[1], f[0]))
}

/// Direction `phi_p` of the guidance field at `(r, t)`.
pub fn field_heading_at(
    r: [f64; 2],
    t: f64,
    reference: &ReferenceTrajectory,
    gains: &UnicycleGains,
) -> Result<f64> {
    field_heading(vector_field(r, t, reference, gains))
}

/// `wrap(theta - phi_p)`.
pub fn heading_error(
    state: &UnicycleState,
    t: f64,
    reference: &ReferenceTrajectory,
    gains: &UnicycleGains,
) -> Result<f64> {
    Ok(wrap_angle(state.theta - field_heading_at(state.r, t, reference, gains)?))
}

/// Time derivative of `phi_p` along the motion with speed `u` and heading `theta`.
///
/// Inside the regularization ball the field is linear in `r_e` with slope
/// `-k delta^(alpha-1)`, so only the first chain-rule term survives there.
pub fn phi_p_dot(
    r: [f64; 2],
    theta: f64,
    u: f64,
    t: f64,
    reference: &ReferenceTrajectory,
    gains: &UnicycleGains,
) -> Result<f64> {
    let f = vector_field(r, t, reference, gains);
    let n2 = dot(&f, &f);
    if sqrt(n2) < DEGENERATE_FIELD {
        return Err(Error::DegenerateField { norm: sqrt(n2) });
    }
    let re = position_error(r, t, reference);
    let rho = norm(&re);
    let gv = reference.velocity(t);
    let ga = reference.acceleration(t);
    let re_dot = [u * cos(theta) - gv[0], u * sin(theta) - gv[1]];
    let (a, b) = if rho > gains.delta {
        let a = pow(rho, gains.alpha - 1.0);
        let b = (gains.alpha - 1.0) * pow(rho, gains.alpha - 3.0) * dot(&re, &re_dot);
        (a, b)
    } else {
        (pow(gains.delta, gains.alpha - 1.0), 0.0)
    };
    let fd = [
        -gains.k * (a * re_dot[0] + b * re[0]) + ga[0],
        -gains.k * (a * re_dot[1] + b * re[1]) + ga[1],
    ];
    Ok((f[0] * fd[1] - f[1] * fd[0]) / n2)
}

/// Speed `u = |F_p|` and turn rate
/// `omega = -k_omega sign(theta_e)|theta_e|^alpha + phi_p'`.
///
/// `u` is fixed first and then used for `phi_p'`.
pub fn control(
    state: &UnicycleState,
    t: f64,
    reference: &ReferenceTrajectory,
    gains: &UnicycleGains,
) -> Result<(f64, f64)> {
    let f = vector_field(state.r, t, reference, gains);
    let phi = field_heading(f)?;
    let u = norm(&f);
    let theta_e = wrap_angle(state.theta - phi);
    let phi_dot = phi_p_dot(state.r, state.theta, u, t, reference, gains)?;
    Ok((u, -gains.k_omega * sig(theta_e, gains.alpha) + phi_dot))
}

/// Closed loop on `[x, y, theta]`; controls are recorded as `[u, omega]`.
#[derive(Debug, Clone)]
pub struct UnicycleLoop {
    pub reference: ReferenceTrajectory,
    pub gains: UnicycleGains,
}

impl UnicycleLoop {
    pub fn new(reference: ReferenceTrajectory, gains: UnicycleGains) -> Result<Self> {
        gains.validate()?;
        Ok(Self { reference, gains })
    }

    pub fn position_error_norm(&self, t: f64, q: &[f64]) -> f64 {
        norm(&position_error([q[0], q[1]], t, &self.reference))
    }

    pub fn heading_error(&self, t: f64, q: &[f64]) -> Result<f64> {
        heading_error(&UnicycleState::from_slice(q), t, &self.reference, &self.gains)
    }
}

impl VectorField for UnicycleLoop {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        let (u, omega) = control(&UnicycleState::from_slice(x), t, &self.reference, &self.gains)?;
        dx[0] = u * cos(x[2]);
        dx[1] = u * sin(x[2]);
        dx[2] = omega;
        Ok(())
    }

    fn control_dim(&self) -> usize {
        2
    }

    fn control(&self, t: f64, x: &[f64], u: &mut [f64]) -> Result<()> {
        let (speed, omega) = control(&UnicycleState::from_slice(x), t, &self.reference, &self.gains)?;
        u[0] = speed;
        u[1] = omega;
        Ok(())
    }

    fn non_lipschitz(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{integrate, StepPolicy};
    use core::f64::consts::PI;

    #[test]
    fn field_on_reference_is_reference_velocity() {
        let r = ReferenceTrajectory::sinusoid();
        let g = UnicycleGains::default();
        for t in [0.0, 1.3, 7.0] {
            assert_eq!(vector_field(r.position(t), t, &r, &g), r.velocity(t));
        }
    }

    #[test]
    fn field_examples() {
        let r = ReferenceTrajectory::sinusoid();
        let g = UnicycleGains::new(0.5, 1.0, 0.3, 1e-6).unwrap();
        let f = vector_field([1.0, 1.0], 0.0, &r, &g);
        assert!((f[0] - 0.5).abs() < 1e-15 && f[1].abs() < 1e-15);
        let s = UnicycleState::new([1.0, 1.0], 0.0);
        let (u, _) = control(&s, 0.0, &r, &g).unwrap();
        assert!((u - 0.5).abs() < 1e-15);
        assert_eq!(field_heading_at([1.0, 1.0], 0.0, &r, &g).unwrap(), 0.0);

        let goal = ReferenceTrajectory::StaticPoint([0.0, 0.0]);
        let g = UnicycleGains::new(1.0, 1.0, 0.5, 1e-6).unwrap();
        let f = vector_field([4.0, 0.0], 0.0, &goal, &g);
        assert!((f[0] + 2.0).abs() < 1e-15 && f[1] == 0.0);
    }

    #[test]
    fn quarter_turn_heading_error() {
        // F_p = [-2, 0], so phi_p = pi and theta = -pi/2 wraps to an error of pi/2.
        let goal = ReferenceTrajectory::StaticPoint([0.0, 0.0]);
        let g = UnicycleGains::new(1.0, 1.0, 0.5, 1e-6).unwrap();
        let s = UnicycleState::new([4.0, 0.0], -PI / 2.0);
        assert!((heading_error(&s, 0.0, &goal, &g).unwrap() - PI / 2.0).abs() < 1e-12);
        let phi_dot = phi_p_dot(s.r, s.theta(), 2.0, 0.0, &goal, &g).unwrap();
        let (_, omega) = control(&s, 0.0, &goal, &g).unwrap();
        assert!((omega - phi_dot + (PI / 2.0).sqrt()).abs() < 1e-12);
        assert!((omega - phi_dot + 1.2533).abs() < 1e-4);
    }

    #[test]
    fn zero_heading_error_gives_feedforward() {
        let r = ReferenceTrajectory::sinusoid();
        let g = UnicycleGains::default();
        let pos = [0.3, 0.2];
        let phi = field_heading_at(pos, 0.4, &r, &g).unwrap();
        let s = UnicycleState::new(pos, phi);
        let f = vector_field(pos, 0.4, &r, &g);
        let (u, omega) = control(&s, 0.4, &r, &g).unwrap();
        assert_eq!(u, norm(&f));
        assert_eq!(omega, phi_p_dot(pos, phi, u, 0.4, &r, &g).unwrap());
    }

    #[test]
    fn line_on_trajectory_has_constant_field() {
        let r = ReferenceTrajectory::Line {
            start: [0.0, 0.0],
            velocity: [1.0, 0.0],
        };
        let g = UnicycleGains::default();
        let s = UnicycleState::new([2.0, 0.0], 0.0);
        let (u, omega) = control(&s, 2.0, &r, &g).unwrap();
        assert_eq!(u, 1.0);
        assert_eq!(omega, 0.0);
    }

    #[test]
    fn circle_on_trajectory_rotates_at_unit_rate() {
        let r = ReferenceTrajectory::Circle {
            center: [0.0, 0.0],
            radius: 1.0,
            omega: 1.0,
        };
        let g = UnicycleGains::default();
        let t = 0.8;
        let pos = r.position(t);
        let phi = field_heading_at(pos, t, &r, &g).unwrap();
        let analytic = phi_p_dot(pos, phi, 1.0, t, &r, &g).unwrap();
        // finite-difference oracle: the vehicle stays on the circle with matched heading
        let h = 1e-5;
        let ahead = field_heading_at(r.position(t + h), t + h, &r, &g).unwrap();
        let behind = field_heading_at(r.position(t - h), t - h, &r, &g).unwrap();
        let numeric = wrap_angle(ahead - behind) / (2.0 * h);
        assert!((numeric - 1.0).abs() < 1e-3);
        assert!((analytic - 1.0).abs() < 1e-3);
    }

    #[test]
    fn phi_dot_matches_finite_difference_along_closed_loop() {
        let r = ReferenceTrajectory::sinusoid();
        let g = UnicycleGains::default();
        let sys = UnicycleLoop::new(r.clone(), g).unwrap();
        let policy = StepPolicy {
            dt: 1e-3,
            ..StepPolicy::default()
        };
        let traj = integrate(&sys, &[0.0, 0.0, 0.0], 0.0, 3.0, &policy, None).unwrap();
        let heading = |i: usize| {
            let q = traj.state(i);
            field_heading_at([q[0], q[1]], traj.time(i), &r, &g).unwrap()
        };
        let mut checked = 0;
        for i in (1..traj.len() - 1).step_by(37) {
            let q = traj.state(i);
            if sys.position_error_norm(traj.time(i), q) < 1e-2 {
                continue;
            }
            let dt = traj.time(i + 1) - traj.time(i - 1);
            let numeric = wrap_angle(heading(i + 1) - heading(i - 1)) / dt;
            let u = traj.control(i)[0];
            let analytic = phi_p_dot([q[0], q[1]], q[2], u, traj.time(i), &r, &g).unwrap();
            assert!((numeric - analytic).abs() < 1e-3, "t = {}: {numeric} vs {analytic}", traj.time(i));
            checked += 1;
        }
        assert!(checked > 20);
    }

    #[test]
    fn control_is_invariant_under_full_turns() {
        let r = ReferenceTrajectory::sinusoid();
        let g = UnicycleGains::default();
        for theta in [-3.0, -0.5, 0.0, 1.0, 3.1] {
            let a = control(&UnicycleState::new([0.5, -1.0], theta), 1.0, &r, &g).unwrap();
            let b = control(&UnicycleState::new([0.5, -1.0], theta + 2.0 * PI), 1.0, &r, &g).unwrap();
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_field_is_reported() {
        let goal = ReferenceTrajectory::StaticPoint([1.0, 1.0]);
        let g = UnicycleGains::default();
        let s = UnicycleState::new([1.0, 1.0], 0.0);
        assert!(matches!(control(&s, 0.0, &goal, &g), Err(Error::DegenerateField { .. })));
    }

    #[test]
    fn gains_are_validated() {
        assert!(UnicycleGains::new(0.0, 1.0, 0.5, 0.0).is_err());
        assert!(UnicycleGains::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(UnicycleGains::new(1.0, -1.0, 0.5, 0.0).is_err());
        assert!(UnicycleGains::new(1.0, 1.0, 0.5, -1.0).is_err());
    }
}
