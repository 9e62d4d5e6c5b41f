//! Planar reference trajectories `r_g(t)` with their first two derivatives.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Result};
use crate::math::{abs, cos, floor, sin};

type PlanarFn = Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>;

/// Tolerance of the finite-difference consistency check in [`ReferenceTrajectory::validate`].
pub const CONSISTENCY_TOLERANCE: f64 = 1e-4;
const CONSISTENCY_SAMPLES: usize = 10;
const CONSISTENCY_STEP: f64 = 1e-5;

#[derive(Clone)]
pub enum ReferenceTrajectory {
    /// `[speed t, amplitude cos(omega t)]`.
    Sinusoid { speed: f64, amplitude: f64, omega: f64 },
    /// `start + velocity t`.
    Line { start: [f64; 2], velocity: [f64; 2] },
    /// `center + radius [cos(omega t), sin(omega t)]`.
    Circle { center: [f64; 2], radius: f64, omega: f64 },
    StaticPoint([f64; 2]),
    /// Piecewise quintic Hermite interpolation of tabulated
    /// position, velocity and acceleration.
    Sampled(SampledTable),
    Custom {
        r: PlanarFn,
        r_dot: PlanarFn,
        r_ddot: PlanarFn,
    },
}

impl fmt::Debug for ReferenceTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sinusoid { speed, amplitude, omega } => f
                .debug_struct("Sinusoid")
                .field("speed", speed)
                .field("amplitude", amplitude)
                .field("omega", omega)
                .finish(),
            Self::Line { start, velocity } => f
                .debug_struct("Line")
                .field("start", start)
                .field("velocity", velocity)
                .finish(),
            Self::Circle { center, radius, omega } => f
                .debug_struct("Circle")
                .field("center", center)
                .field("radius", radius)
                .field("omega", omega)
                .finish(),
            Self::StaticPoint(p) => f.debug_tuple("StaticPoint").field(p).finish(),
            Self::Sampled(t) => f.debug_tuple("Sampled").field(&t.len()).finish(),
            Self::Custom { .. } => f.write_str("Custom"),
        }
    }
}

impl ReferenceTrajectory {
    /// `[t, cos t]`.
    pub fn sinusoid() -> Self {
        Self::Sinusoid {
            speed: 1.0,
            amplitude: 1.0,
            omega: 1.0,
        }
    }

    pub fn custom(
        r: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
        r_dot: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
        r_ddot: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            r: Arc::new(r),
            r_dot: Arc::new(r_dot),
            r_ddot: Arc::new(r_ddot),
        }
    }

    pub fn position(&self, t: f64) -> [f64; 2] {
        match self {
            Self::Sinusoid { speed, amplitude, omega } => [speed * t, amplitude * cos(omega * t)],
            Self::Line { start, velocity } => {
                [start[0] + velocity[0] * t, start[1] + velocity[1] * t]
            }
            Self::Circle { center, radius, omega } => [
                center[0] + radius * cos(omega * t),
                center[1] + radius * sin(omega * t),
            ],
            Self::StaticPoint(p) => *p,
            Self::Sampled(table) => table.eval(t, 0),
            Self::Custom { r, .. } => r(t),
        }
    }

    pub fn velocity(&self, t: f64) -> [f64; 2] {
        match self {
            Self::Sinusoid { speed, amplitude, omega } => {
                [*speed, -amplitude * omega * sin(omega * t)]
            }
            Self::Line { velocity, .. } => *velocity,
            Self::Circle { radius, omega, .. } => [
                -radius * omega * sin(omega * t),
                radius * omega * cos(omega * t),
            ],
            Self::StaticPoint(_) => [0.0, 0.0],
            Self::Sampled(table) => table.eval(t, 1),
            Self::Custom { r_dot, .. } => r_dot(t),
        }
    }

    pub fn acceleration(&self, t: f64) -> [f64; 2] {
        match self {
            Self::Sinusoid { amplitude, omega, .. } => {
                [0.0, -amplitude * omega * omega * cos(omega * t)]
            }
            Self::Line { .. } | Self::StaticPoint(_) => [0.0, 0.0],
            Self::Circle { radius, omega, .. } => {
                let w2 = radius * omega * omega;
                [-w2 * cos(omega * t), -w2 * sin(omega * t)]
            }
            Self::Sampled(table) => table.eval(t, 2),
            Self::Custom { r_ddot, .. } => r_ddot(t),
        }
    }

    /// Checks that velocity and acceleration agree with central differences
    /// of position and velocity at spread-out times in `[t0, t1]`.
    pub fn validate(&self, t0: f64, t1: f64) -> Result<()> {
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(invalid("reference", "validation window must be finite and non-empty"));
        }
        let h = CONSISTENCY_STEP;
        let inner = (t1 - t0 - 2.0 * h).max(0.0);
        for t in spread_times(CONSISTENCY_SAMPLES) {
            let t = t0 + h + inner * t;
            let (p_plus, p_minus) = (self.position(t + h), self.position(t - h));
            let (v_plus, v_minus) = (self.velocity(t + h), self.velocity(t - h));
            let v = self.velocity(t);
            let a = self.acceleration(t);
            for i in 0..2 {
                let dv = (p_plus[i] - p_minus[i]) / (2.0 * h);
                let da = (v_plus[i] - v_minus[i]) / (2.0 * h);
                if !(abs(dv - v[i]) <= CONSISTENCY_TOLERANCE * (1.0 + abs(v[i]))) {
                    return Err(invalid(
                        "reference",
                        format!("velocity inconsistent with position at t = {t}: {} vs {dv}", v[i]),
                    ));
                }
                if !(abs(da - a[i]) <= CONSISTENCY_TOLERANCE * (1.0 + abs(a[i]))) {
                    return Err(invalid(
                        "reference",
                        format!("acceleration inconsistent with velocity at t = {t}: {} vs {da}", a[i]),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Additive-recurrence points in `[0, 1)`; deterministic but well spread.
fn spread_times(n: usize) -> impl Iterator<Item = f64> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    (0..n).map(|i| {
        let v = (i as f64 + 0.5) * GOLDEN;
        v - floor(v)
    })
}

/// Tabulated `(t, r, r', r'')` rows with strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTable {
    times: Vec<f64>,
    pos: Vec<[f64; 2]>,
    vel: Vec<[f64; 2]>,
    acc: Vec<[f64; 2]>,
}

impl SampledTable {
    pub fn new(
        times: Vec<f64>,
        pos: Vec<[f64; 2]>,
        vel: Vec<[f64; 2]>,
        acc: Vec<[f64; 2]>,
    ) -> Result<Self> {
        let n = times.len();
        if n < 2 {
            return Err(invalid("reference", "a sampled table needs at least two rows"));
        }
        if pos.len() != n || vel.len() != n || acc.len() != n {
            return Err(invalid("reference", "all columns must have the same length"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("reference", "times must be strictly increasing"));
        }
        let finite = |c: &[[f64; 2]]| c.iter().flatten().all(|v| v.is_finite());
        if !times.iter().all(|t| t.is_finite()) || !finite(&pos) || !finite(&vel) || !finite(&acc) {
            return Err(invalid("reference", "table entries must be finite"));
        }
        Ok(Self { times, pos, vel, acc })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `order`-th derivative at `t`; outside the table the end segments are extended.
    fn eval(&self, t: f64, order: usize) -> [f64; 2] {
        let last = self.times.len() - 2;
        let seg = match self.times.partition_point(|&ti| ti <= t) {
            0 => 0,
            i => (i - 1).min(last),
        };
        let (ta, tb) = (self.times[seg], self.times[seg + 1]);
        let h = tb - ta;
        let s = (t - ta) / h;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            let (p0, p1) = (self.pos[seg][i], self.pos[seg + 1][i]);
            let (v0, v1) = (h * self.vel[seg][i], h * self.vel[seg + 1][i]);
            let (a0, a1) = (h * h * self.acc[seg][i], h * h * self.acc[seg + 1][i]);
            let dp = p1 - p0;
            let c = [
                p0,
                v0,
                0.5 * a0,
                10.0 * dp - 6.0 * v0 - 4.0 * v1 - 1.5 * a0 + 0.5 * a1,
                -15.0 * dp + 8.0 * v0 + 7.0 * v1 + 1.5 * a0 - a1,
                6.0 * dp - 3.0 * v0 - 3.0 * v1 - 0.5 * a0 + 0.5 * a1,
            ];
            *o = poly_derivative(&c, s, order) / powi(h, order);
        }
        out
    }
}

fn powi(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

/// `d^order/ds^order` of `sum c_j s^j`.
fn poly_derivative(c: &[f64], s: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    for j in (order..c.len()).rev() {
        let factor: f64 = (j - order + 1..=j).map(|m| m as f64).product();
        acc = acc * s + factor * c[j];
    }
    acc
}
