//! Fixed-step integration of closed-loop vector fields.
//!
//! Finite-time flows are not Lipschitz at their equilibrium, so a discrete
//! stepper overshoots the fixed point and chatters around it (RK4 even has
//! spurious fixed points a few `dt^2` away from it). The integrator therefore
//! accepts an optional equilibrium and a snap radius. Near the equilibrium a
//! step whose Euler predictor reaches past the equilibrium is split in
//! halves. The state is pinned to the equilibrium for the rest of the horizon
//! once a step enters the snap ball (either endpoint inside it, or the chord
//! between them crossing it), or once a split step is negligibly short and
//! still overshoots.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{at_time, invalid, Error, Result};
use crate::math::{dist, dot, norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Euler,
}

/// Step size and snapping rules for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub method: Method,
    pub dt: f64,
    pub snap_radius: f64,
    /// Default regularization radius handed to controllers whose gains do not
    /// set their own.
    pub regularization: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            dt: 1e-3,
            snap_radius: 1e-9,
            regularization: 1e-6,
        }
    }
}

impl StepPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid("dt", "must be positive and finite"));
        }
        if !(self.snap_radius >= 0.0) {
            return Err(invalid("snap_radius", "must be non-negative"));
        }
        if !(self.regularization >= 0.0) {
            return Err(invalid("regularization", "must be non-negative"));
        }
        Ok(())
    }
}

/// A time-varying vector field `x' = f(t, x)`, optionally exposing the
/// control input that produced it so it can be recorded alongside the state.
pub trait VectorField {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()>;

    fn control_dim(&self) -> usize {
        0
    }

    fn control(&self, _t: f64, _x: &[f64], _u: &mut [f64]) -> Result<()> {
        Ok(())
    }

    /// Whether the field is known to be non-Lipschitz at its equilibrium.
    fn non_lipschitz(&self) -> bool {
        false
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        (**self).eval(t, x, dx)
    }
    fn control_dim(&self) -> usize {
        (**self).control_dim()
    }
    fn control(&self, t: f64, x: &[f64], u: &mut [f64]) -> Result<()> {
        (**self).control(t, x, u)
    }
    fn non_lipschitz(&self) -> bool {
        (**self).non_lipschitz()
    }
}

/// Adapts a closure `(t, x, dx)` into a [`VectorField`] without controls.
pub struct FnField<F> {
    dim: usize,
    non_lipschitz: bool,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        Self {
            dim,
            non_lipschitz: false,
            f,
        }
    }

    pub fn non_lipschitz(mut self) -> Self {
        self.non_lipschitz = true;
        self
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        (self.f)(t, x, dx);
        Ok(())
    }

    fn non_lipschitz(&self) -> bool {
        self.non_lipschitz
    }
}

/// Time-stamped states and controls. Storage is flat, row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    control_dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    controls: Vec<f64>,
    snapped_at: Option<usize>,
    warnings: Vec<String>,
}

impl Trajectory {
    pub fn new(dim: usize, control_dim: usize) -> Self {
        Self {
            dim,
            control_dim,
            times: Vec::new(),
            states: Vec::new(),
            controls: Vec::new(),
            snapped_at: None,
            warnings: Vec::new(),
        }
    }

    /// Appends a sample. Times must be strictly increasing and states finite.
    pub fn push(&mut self, t: f64, state: &[f64], control: &[f64]) -> Result<()> {
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: state.len(),
            });
        }
        if control.len() != self.control_dim {
            return Err(Error::DimensionMismatch {
                expected: self.control_dim,
                found: control.len(),
            });
        }
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(invalid("t", "sample times must be strictly increasing"));
            }
        }
        if !t.is_finite() || state.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationFailure { time: t });
        }
        self.times.push(t);
        self.states.extend_from_slice(state);
        self.controls.extend_from_slice(control);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn control_dim(&self) -> usize {
        self.control_dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn control(&self, i: usize) -> &[f64] {
        &self.controls[i * self.control_dim..(i + 1) * self.control_dim]
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        (!self.is_empty()).then(|| self.state(self.len() - 1))
    }

    /// Index of the first sample pinned to the equilibrium, if any.
    pub fn snapped_at(&self) -> Option<usize> {
        self.snapped_at
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64], &[f64])> + '_ {
        (0..self.len()).map(move |i| (self.times[i], self.state(i), self.control(i)))
    }
}

/// Number of steps and the sample time for step index `k` on `[t0, tf]`.
fn time_grid(t0: f64, tf: f64, dt: f64) -> usize {
    let ratio = (tf - t0) / dt;
    let nearest = libm::round(ratio);
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        libm::ceil(ratio) as usize
    }
}

fn check_finite(t: f64, dx: &[f64]) -> Result<()> {
    if dx.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::IntegrationFailure { time: t })
    }
}

/// Distance from `e` to the segment `[a, b]`.
fn segment_distance(a: &[f64], b: &[f64], e: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
    let ae: Vec<f64> = a.iter().zip(e).map(|(p, q)| q - p).collect();
    let len2 = dot(&ab, &ab);
    let s = if len2 > 0.0 {
        (dot(&ae, &ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let closest: Vec<f64> = a.iter().zip(&ab).map(|(p, d)| p + s * d).collect();
    dist(&closest, e)
}

/// Shortest split step, as a fraction of the outer step, before an
/// overshooting step counts as having reached the equilibrium.
const MIN_SUBSTEP_FRACTION: f64 = 1.0 / (1u64 << 40) as f64;
/// Split steps allowed within one outer step before splitting is abandoned.
const MAX_SUBSTEPS: usize = 4096;

struct Stepper {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
    cur: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
            cur: vec![0.0; n],
        }
    }

    /// Advances `x` by `h` into `out`, splitting the step near `eq`.
    /// Returns whether the state was pinned to `eq`.
    #[allow(clippy::too_many_arguments)]
    fn advance<F: VectorField>(
        &mut self,
        field: &F,
        method: Method,
        t: f64,
        h: f64,
        x: &[f64],
        out: &mut [f64],
        eq: &[f64],
        radius: f64,
    ) -> Result<bool> {
        let h_min = h * MIN_SUBSTEP_FRACTION;
        let mut cur = core::mem::take(&mut self.cur);
        cur.copy_from_slice(x);
        let mut elapsed = 0.0;
        let mut sub = h;
        let mut count = 0;
        let outcome = loop {
            let remaining = h - elapsed;
            if remaining <= 0.0 {
                break Ok(false);
            }
            let s = sub.min(remaining);
            let ts = t + elapsed;
            if let Err(e) = Self::eval(field, ts, &cur, &mut self.k1) {
                break Err(e);
            }
            if count < MAX_SUBSTEPS && s * norm(&self.k1) > dist(&cur, eq) {
                count += 1;
                if s <= h_min {
                    break Ok(true);
                }
                sub = 0.5 * s;
                continue;
            }
            if let Err(e) = self.step_from_k1(field, method, ts, s, &cur, out) {
                break Err(e);
            }
            count += 1;
            if segment_distance(&cur, out, eq) < radius {
                break Ok(true);
            }
            cur.copy_from_slice(out);
            elapsed = if s == remaining { h } else { elapsed + s };
            sub = (2.0 * sub).min(h);
        };
        match outcome {
            Ok(true) => out.copy_from_slice(eq),
            Ok(false) => out.copy_from_slice(&cur),
            Err(_) => {}
        }
        self.cur = cur;
        outcome
    }

    fn eval<F: VectorField>(field: &F, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        field.eval(t, x, dx).map_err(|e| at_time(t, e))?;
        check_finite(t, dx)
    }

    fn step<F: VectorField>(
        &mut self,
        field: &F,
        method: Method,
        t: f64,
        h: f64,
        x: &[f64],
        out: &mut [f64],
    ) -> Result<()> {
        Self::eval(field, t, x, &mut self.k1)?;
        self.step_from_k1(field, method, t, h, x, out)
    }

    /// Like [`Stepper::step`] with `self.k1` already holding `f(t, x)`.
    #[allow(clippy::needless_range_loop)]
    fn step_from_k1<F: VectorField>(
        &mut self,
        field: &F,
        method: Method,
        t: f64,
        h: f64,
        x: &[f64],
        out: &mut [f64],
    ) -> Result<()> {
        match method {
            Method::Euler => {
                for i in 0..x.len() {
                    out[i] = x[i] + h * self.k1[i];
                }
            }
            Method::Rk4 => {
                for i in 0..x.len() {
                    self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
                }
                Self::eval(field, t + 0.5 * h, &self.tmp, &mut self.k2)?;
                for i in 0..x.len() {
                    self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
                }
                Self::eval(field, t + 0.5 * h, &self.tmp, &mut self.k3)?;
                for i in 0..x.len() {
                    self.tmp[i] = x[i] + h * self.k3[i];
                }
                Self::eval(field, t + h, &self.tmp, &mut self.k4)?;
                for i in 0..x.len() {
                    out[i] = x[i]
                        + h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
                }
            }
        }
        check_finite(t + h, out)
    }
}

/// Integrates `field` from `x0` over `[t0, tf]` on a fixed grid.
///
/// With an `equilibrium` and a positive snap radius the state is pinned to
/// the equilibrium as soon as a step enters the snap ball.
pub fn integrate<F: VectorField>(
    field: &F,
    x0: &[f64],
    t0: f64,
    tf: f64,
    policy: &StepPolicy,
    equilibrium: Option<&[f64]>,
) -> Result<Trajectory> {
    policy.validate()?;
    let n = field.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if let Some(eq) = equilibrium {
        if eq.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: eq.len(),
            });
        }
    }
    if !(tf > t0) {
        return Err(invalid("tf", "horizon must satisfy tf > t0"));
    }

    let m = field.control_dim();
    let mut traj = Trajectory::new(n, m);
    let snap = equilibrium.filter(|_| policy.snap_radius > 0.0);
    if field.non_lipschitz() && snap.is_none() {
        traj.warnings.push(String::from(
            "non-Lipschitz field integrated without a snap radius; expect chattering near the equilibrium",
        ));
    }

    let steps = time_grid(t0, tf, policy.dt);
    let mut x = x0.to_vec();
    let mut next = vec![0.0; n];
    let mut u = vec![0.0; m];
    let mut stepper = Stepper::new(n);
    let mut snapped = false;

    if let Some(eq) = snap {
        if dist(&x, eq) < policy.snap_radius {
            x.copy_from_slice(eq);
            snapped = true;
            traj.snapped_at = Some(0);
        }
    }

    for k in 0..=steps {
        let t = if k == steps {
            tf
        } else {
            t0 + k as f64 * policy.dt
        };
        field.control(t, &x, &mut u).map_err(|e| at_time(t, e))?;
        traj.push(t, &x, &u)
            .map_err(|_| Error::IntegrationFailure { time: t })?;
        if k == steps {
            break;
        }
        let t_next = if k + 1 == steps {
            tf
        } else {
            t0 + (k + 1) as f64 * policy.dt
        };
        if snapped {
            continue;
        }
        if let Some(eq) = snap {
            let h = t_next - t;
            if stepper.advance(field, policy.method, t, h, &x, &mut next, eq, policy.snap_radius)? {
                snapped = true;
                traj.snapped_at = Some(k + 1);
            }
        } else {
            stepper.step(field, policy.method, t, t_next - t, &x, &mut next)?;
        }
        core::mem::swap(&mut x, &mut next);
    }
    if traj.snapped_at.is_none() && snap.is_some() && field.non_lipschitz() {
        traj.warnings.push(format!(
            "state never entered the snap ball of radius {:e}",
            policy.snap_radius
        ));
    }
    Ok(traj)
}

/// Outcome of [`detect_settling`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettlingReport {
    pub settled: bool,
    /// First sample time from which the error stays inside the band.
    pub time: Option<f64>,
    pub eps: f64,
    pub dwell: f64,
}

/// Default dwell: 5% of the horizon.
pub fn default_dwell(t0: f64, tf: f64) -> f64 {
    0.05 * (tf - t0)
}

/// Settling against a fixed target state, using the Euclidean distance.
pub fn detect_settling(
    traj: &Trajectory,
    target: &[f64],
    eps: f64,
    dwell: f64,
) -> Result<SettlingReport> {
    if target.len() != traj.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.dim(),
            found: target.len(),
        });
    }
    detect_settling_by(traj, |_, x| dist(x, target), eps, dwell)
}

/// Settling against an arbitrary error signal `error(t, x)`, e.g. the
/// distance to a moving reference.
///
/// The settling time is the first sample after which `error <= eps` holds
/// through the end of the horizon, provided that tail lasts at least `dwell`.
pub fn detect_settling_by<E>(
    traj: &Trajectory,
    error: E,
    eps: f64,
    dwell: f64,
) -> Result<SettlingReport>
where
    E: Fn(f64, &[f64]) -> f64,
{
    if traj.is_empty() {
        return Err(invalid("traj", "trajectory is empty"));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps", "must be positive"));
    }
    if !(dwell >= 0.0) {
        return Err(invalid("dwell", "must be non-negative"));
    }
    let t_first = traj.time(0);
    let t_last = traj.time(traj.len() - 1);
    if dwell > t_last - t_first {
        return Err(Error::NotEnoughHorizon {
            dwell,
            horizon: t_last - t_first,
        });
    }

    let mut first_inside = None;
    for i in (0..traj.len()).rev() {
        let e = error(traj.time(i), traj.state(i));
        if e <= eps {
            first_inside = Some(i);
        } else {
            break;
        }
    }
    let time = first_inside
        .map(|i| traj.time(i))
        .filter(|&t| t_last - t >= dwell);
    Ok(SettlingReport {
        settled: time.is_some(),
        time,
        eps,
        dwell,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{abs, sig};

    fn decay() -> FnField<impl Fn(f64, &[f64], &mut [f64])> {
        FnField::new(1, |_, x, dx| dx[0] = -x[0])
    }

    fn sqrt_flow() -> FnField<impl Fn(f64, &[f64], &mut [f64])> {
        FnField::new(1, |_, x, dx| dx[0] = -sig(x[0], 0.5)).non_lipschitz()
    }

    #[test]
    fn zero_field_is_constant() {
        let f = FnField::new(1, |_, _, dx: &mut [f64]| dx[0] = 0.0);
        let traj = integrate(&f, &[1.0], 0.0, 1.0, &StepPolicy::default(), None).unwrap();
        assert_eq!(traj.len(), 1001);
        assert!(traj.iter().all(|(_, x, _)| x[0] == 1.0));
        assert_eq!(traj.time(traj.len() - 1), 1.0);
    }

    #[test]
    fn linear_decay_matches_exponential() {
        let traj = integrate(&decay(), &[1.0], 0.0, 1.0, &StepPolicy::default(), None).unwrap();
        let end = traj.last_state().unwrap()[0];
        assert!(abs(end - libm::exp(-1.0)) < 1e-6, "{end}");
    }

    #[test]
    fn sqrt_flow_snaps_to_zero_near_two_seconds() {
        let traj = integrate(
            &sqrt_flow(),
            &[1.0],
            0.0,
            3.0,
            &StepPolicy::default(),
            Some(&[0.0]),
        )
        .unwrap();
        let k = traj.snapped_at().expect("snapped");
        let ts = traj.time(k);
        assert!(abs(ts - 2.0) < 0.01, "snapped at {ts}");
        for i in k..traj.len() {
            assert_eq!(traj.state(i)[0], 0.0);
        }
        assert!(traj.warnings().is_empty());
    }

    #[test]
    fn non_lipschitz_without_snap_warns() {
        let traj = integrate(&sqrt_flow(), &[1.0], 0.0, 0.1, &StepPolicy::default(), None).unwrap();
        assert_eq!(traj.warnings().len(), 1);
    }

    #[test]
    fn non_finite_derivative_reports_time() {
        let f = FnField::new(1, |t, _, dx: &mut [f64]| {
            dx[0] = if t >= 0.5 { f64::NAN } else { 1.0 }
        });
        let err = integrate(&f, &[0.0], 0.0, 1.0, &StepPolicy::default(), None).unwrap_err();
        match err {
            Error::IntegrationFailure { time } => assert!((0.499..=0.5).contains(&time)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_horizon_rejected() {
        assert!(integrate(&decay(), &[1.0], 1.0, 1.0, &StepPolicy::default(), None).is_err());
        let bad = StepPolicy {
            dt: 0.0,
            ..StepPolicy::default()
        };
        assert!(integrate(&decay(), &[1.0], 0.0, 1.0, &bad, None).is_err());
    }

    #[test]
    fn uneven_horizon_ends_exactly_at_tf() {
        let p = StepPolicy {
            dt: 0.3,
            ..StepPolicy::default()
        };
        let traj = integrate(&decay(), &[1.0], 0.0, 1.0, &p, None).unwrap();
        assert_eq!(traj.times(), &[0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
    }

    #[test]
    fn rk4_error_drops_at_least_eightfold_when_halving_dt() {
        let err = |dt: f64| {
            let p = StepPolicy {
                dt,
                ..StepPolicy::default()
            };
            let traj = integrate(&decay(), &[1.0], 0.0, 1.0, &p, None).unwrap();
            abs(traj.last_state().unwrap()[0] - libm::exp(-1.0))
        };
        for dt in [0.1, 0.05, 0.025] {
            assert!(err(dt) / err(dt / 2.0) >= 8.0);
        }
    }

    #[test]
    fn euler_is_first_order() {
        let err = |dt: f64| {
            let p = StepPolicy {
                method: Method::Euler,
                dt,
                ..StepPolicy::default()
            };
            let traj = integrate(&decay(), &[1.0], 0.0, 1.0, &p, None).unwrap();
            abs(traj.last_state().unwrap()[0] - libm::exp(-1.0))
        };
        let ratio = err(0.01) / err(0.005);
        assert!(ratio > 1.8 && ratio < 2.2, "{ratio}");
    }

    #[test]
    fn settling_of_constant_trajectory_is_t0() {
        let f = FnField::new(2, |_, _, dx: &mut [f64]| dx.fill(0.0));
        let traj = integrate(&f, &[1.0, 2.0], 0.5, 1.5, &StepPolicy::default(), None).unwrap();
        let r = detect_settling(&traj, &[1.0, 2.0], 1e-9, 0.05).unwrap();
        assert!(r.settled);
        assert_eq!(r.time, Some(0.5));
    }

    #[test]
    fn settling_of_sqrt_flow_matches_closed_form() {
        let traj = integrate(
            &sqrt_flow(),
            &[1.0],
            0.0,
            3.0,
            &StepPolicy::default(),
            Some(&[0.0]),
        )
        .unwrap();
        let r = detect_settling(&traj, &[0.0], 1e-6, 0.15).unwrap();
        assert!(r.settled);
        assert!(abs(r.time.unwrap() - 2.0) <= 0.02, "{:?}", r.time);
    }

    #[test]
    fn exponential_never_settles_to_tiny_band() {
        let traj = integrate(&decay(), &[1.0], 0.0, 10.0, &StepPolicy::default(), None).unwrap();
        let r = detect_settling(&traj, &[0.0], 1e-12, 0.5).unwrap();
        assert!(!r.settled);
        assert_eq!(r.time, None);
    }

    #[test]
    fn dwell_longer_than_horizon_is_an_error() {
        let traj = integrate(&decay(), &[1.0], 0.0, 1.0, &StepPolicy::default(), None).unwrap();
        assert!(matches!(
            detect_settling(&traj, &[0.0], 1e-3, 2.0),
            Err(Error::NotEnoughHorizon { .. })
        ));
    }

    #[test]
    fn short_tail_does_not_count_as_settled() {
        // enters the band only in the last 0.1 s of a 10 s run
        let traj = integrate(&decay(), &[1.0], 0.0, 10.0, &StepPolicy::default(), None).unwrap();
        let eps = libm::exp(-9.9);
        let r = detect_settling(&traj, &[0.0], eps, 0.5).unwrap();
        assert!(!r.settled);
        let r = detect_settling(&traj, &[0.0], eps, 0.05).unwrap();
        assert!(r.settled);
    }

    #[test]
    fn integration_is_deterministic() {
        let run = || {
            integrate(
                &sqrt_flow(),
                &[0.7],
                0.0,
                2.0,
                &StepPolicy::default(),
                Some(&[0.0]),
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn push_rejects_non_monotone_times() {
        let mut traj = Trajectory::new(1, 0);
        traj.push(0.0, &[1.0], &[]).unwrap();
        assert!(traj.push(0.0, &[1.0], &[]).is_err());
        assert!(traj.push(1.0, &[f64::INFINITY], &[]).is_err());
    }
}
