//! Numerical evidence for finite-time stability.
//!
//! Scalar fields `x' = h(x)` are probed two ways: the slope test looks at the
//! one-sided difference quotients `h(x)/x` on a geometric grid (a finite-time
//! stable origin forces them to `-inf`), and the envelope fit searches for
//! `k > 0`, `0 < alpha < 1` with `sign(x) h(x) <= -k |x|^alpha` on a grid,
//! which is sufficient. Trajectory-level checks verify the Lyapunov decrement
//! `V' + c V^beta <= 0` by central differences.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::lti::x_alpha;
use crate::math::{abs, exp, log, pow, sig, sign, sqrt};
use crate::sim::{Trajectory, VectorField};

/// Quotients below this value count as diverging to `-inf`.
pub const DIVERGENCE_THRESHOLD: f64 = -1e6;
/// Number of innermost grid points inspected for a trend.
pub const TREND_POINTS: usize = 4;
/// Relative change over the trend window below which the slope is finite.
pub const FINITE_RELATIVE_CHANGE: f64 = 1e-3;
/// Successive increments of a convergent quotient sequence shrink
/// geometrically as the grid halves; increments shrinking slower than this
/// ratio mean the slope keeps falling without a limit.
pub const NON_CONTRACTING_RATIO: f64 = 0.9;
/// Envelopes whose gain falls below this are flagged as degenerate.
pub const DEGENERATE_GAIN: f64 = 1e-6;
/// Fitted exponents this close to 0 or 1 are rejected.
pub const ALPHA_ROUNDOFF: f64 = 1e-9;

/// Innermost-decade slope exceeding the fitted exponent by more than this
/// flags the envelope as degenerate (the field stiffens toward linear).
pub const SLOPE_DRIFT_TOLERANCE: f64 = 0.02;

/// A scalar dynamics `h` with its declared domain `[lo, hi]`.
pub struct ScalarField<F = Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    h: F,
    lo: f64,
    hi: f64,
}

impl<F: Fn(f64) -> f64> ScalarField<F> {
    pub fn new(h: F, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < 0.0 && hi > 0.0) {
            return Err(invalid("domain", "must contain 0 in its interior"));
        }
        let h0 = h(0.0);
        if !(abs(h0) <= 1e-12) {
            return Err(invalid("h", "h(0) must vanish"));
        }
        Ok(Self { h, lo, hi })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < self.lo || x > self.hi {
            return Err(Error::Domain { x });
        }
        let v = (self.h)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain { x })
        }
    }
}

impl ScalarField {
    pub fn boxed<G: Fn(f64) -> f64 + Send + Sync + 'static>(h: G, lo: f64, hi: f64) -> Result<Self> {
        ScalarField::new(Box::new(h) as Box<dyn Fn(f64) -> f64 + Send + Sync>, lo, hi)
    }
}

/// Built-in scalar field families.
pub mod fields {
    use super::*;

    /// `h(x) = -k sign(x)|x|^alpha` on `[-edge, edge]`.
    pub fn power_law(k: f64, alpha: f64, edge: f64) -> Result<ScalarField> {
        ScalarField::boxed(move |x| -k * sig(x, alpha), -edge, edge)
    }

    /// `h(x) = -k x`.
    pub fn linear(k: f64, edge: f64) -> Result<ScalarField> {
        ScalarField::boxed(move |x| -k * x, -edge, edge)
    }

    /// The flow of `x(t) = x0 exp(-t^2)` written as a field,
    /// `h(x) = -2x sqrt(ln(1/|x|))` on `[-1/2, 1/2]`: infinite slope at the
    /// origin, yet trajectories only reach it asymptotically.
    pub fn gaussian_decay() -> Result<ScalarField> {
        ScalarField::boxed(
            |x| {
                if x == 0.0 {
                    0.0
                } else {
                    -2.0 * x * sqrt(log(1.0 / abs(x)))
                }
            },
            -0.5,
            0.5,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeVerdict {
    DivergentSlope,
    FiniteSlope,
    Inconclusive,
}

/// Difference quotients behind a [`SlopeVerdict`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeTrend {
    pub verdict: SlopeVerdict,
    /// Positive grid `window * 2^-j`.
    pub grid: Vec<f64>,
    /// `h(x)/x` at `+grid`.
    pub right: Vec<f64>,
    /// `h(x)/x` at `-grid`.
    pub left: Vec<f64>,
    /// Estimated slope at the origin when finite.
    pub limit: Option<f64>,
}

fn classify(q: &[f64]) -> SlopeVerdict {
    let tail = &q[q.len() - TREND_POINTS..];
    let last = tail[TREND_POINTS - 1];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    if decreasing {
        let steps: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
        let non_contracting = steps.windows(2).all(|s| s[1] / s[0] >= NON_CONTRACTING_RATIO);
        if last < DIVERGENCE_THRESHOLD || non_contracting {
            return SlopeVerdict::DivergentSlope;
        }
    }
    let change = abs(last - tail[0]) / abs(last).max(1.0);
    if change < FINITE_RELATIVE_CHANGE {
        SlopeVerdict::FiniteSlope
    } else {
        SlopeVerdict::Inconclusive
    }
}

/// Probes whether `dh/dx` at the origin is `-inf`, a property every
/// finite-time stable scalar field has (but which does not imply it).
pub fn check_necessary_condition<F: Fn(f64) -> f64>(
    f: &ScalarField<F>,
    window: f64,
    num_samples: usize,
) -> Result<SlopeTrend> {
    if !(window > 0.0) {
        return Err(invalid("window", "must be positive"));
    }
    if num_samples < 8 {
        return Err(invalid("num_samples", "need at least 8 grid points"));
    }
    let grid: Vec<f64> = (0..num_samples)
        .map(|j| window * pow(2.0, -(j as f64)))
        .collect();
    let mut right = Vec::with_capacity(num_samples);
    let mut left = Vec::with_capacity(num_samples);
    for &x in &grid {
        right.push(f.eval(x)? / x);
        left.push(f.eval(-x)? / -x);
    }
    let (vr, vl) = (classify(&right), classify(&left));
    let verdict = if vr == vl { vr } else { SlopeVerdict::Inconclusive };
    let limit = (verdict == SlopeVerdict::FiniteSlope)
        .then(|| 0.5 * (right[num_samples - 1] + left[num_samples - 1]));
    Ok(SlopeTrend {
        verdict,
        grid,
        right,
        left,
        limit,
    })
}

/// Result of [`fit_sufficient_envelope`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    pub found: bool,
    pub k: f64,
    pub alpha: f64,
    /// `min (-sign(x)h(x) - k|x|^alpha)` over the grid; non-negative when found.
    pub violation_margin: f64,
    /// Found, but the gain is vanishing or the field straightens out toward
    /// the origin, so the envelope should not be trusted to extend to 0.
    pub degenerate: bool,
    /// Log-log slope over the innermost decade of the grid.
    pub inner_slope: Option<f64>,
}

/// 64 log-spaced points per sign over `[1e-8, edge]`, where `edge` is the
/// nearer domain boundary.
pub fn default_envelope_grid(lo: f64, hi: f64) -> Vec<f64> {
    log_grid(1e-8, abs(lo).min(hi), 64)
}

/// `per_sign` log-spaced magnitudes in `[min, max]`, negatives first.
pub fn log_grid(min: f64, max: f64, per_sign: usize) -> Vec<f64> {
    let (a, b) = (log(min), log(max));
    let last = per_sign.saturating_sub(1);
    let mags: Vec<f64> = (0..per_sign)
        .map(|i| match i {
            0 => min,
            i if i == last => max,
            i => exp(a + (b - a) * i as f64 / last as f64),
        })
        .collect();
    mags.iter()
        .rev()
        .map(|m| -m)
        .chain(mags.iter().copied())
        .collect()
}

fn least_squares(u: &[f64], y: &[f64]) -> (f64, f64) {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in u.iter().zip(y) {
        sxy += (a - mu) * (b - my);
        sxx += (a - mu) * (a - mu);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mu)
}

fn check_symmetric(grid: &[f64]) -> Result<()> {
    let mut pos: Vec<f64> = grid.iter().copied().filter(|&x| x > 0.0).collect();
    let mut neg: Vec<f64> = grid.iter().copied().filter(|&x| x < 0.0).map(|x| -x).collect();
    pos.sort_by(|a, b| a.total_cmp(b));
    neg.sort_by(|a, b| a.total_cmp(b));
    let symmetric = pos.len() == neg.len()
        && pos
            .iter()
            .zip(&neg)
            .all(|(a, b)| abs(a - b) <= 1e-12 * a.max(*b));
    if symmetric {
        Ok(())
    } else {
        Err(invalid("grid", "must be symmetric about 0"))
    }
}

/// Fits `sign(x) h(x) <= -k|x|^alpha` on `grid`: log-log regression proposes
/// `(k, alpha)`, then `k` is shrunk until the inequality holds at every sample.
pub fn fit_sufficient_envelope<F: Fn(f64) -> f64>(
    f: &ScalarField<F>,
    grid: &[f64],
) -> Result<EnvelopeFit> {
    if grid.is_empty() {
        return Err(invalid("grid", "must be non-empty"));
    }
    if grid.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return Err(invalid("grid", "samples must be finite and non-zero"));
    }
    check_symmetric(grid)?;

    // s = -sign(x) h(x); the envelope needs s >= k|x|^alpha > 0.
    let mut s = Vec::with_capacity(grid.len());
    for &x in grid {
        let v = -sign(x) * f.eval(x)?;
        if v < 0.0 {
            return Err(Error::NotStable { x });
        }
        s.push(v);
    }
    let not_found = EnvelopeFit {
        found: false,
        k: 0.0,
        alpha: f64::NAN,
        violation_margin: f64::NEG_INFINITY,
        degenerate: false,
        inner_slope: None,
    };
    if s.contains(&0.0) {
        return Ok(not_found);
    }

    let u: Vec<f64> = grid.iter().map(|&x| log(abs(x))).collect();
    let y: Vec<f64> = s.iter().map(|&v| log(v)).collect();
    let (alpha, intercept) = least_squares(&u, &y);

    let min_mag = grid.iter().map(|&x| abs(x)).fold(f64::INFINITY, f64::min);
    let (iu, iy): (Vec<f64>, Vec<f64>) = u
        .iter()
        .zip(&y)
        .filter(|(&a, _)| a <= log(10.0 * min_mag))
        .map(|(a, b)| (*a, *b))
        .unzip();
    let distinct = {
        let mut v = iu.clone();
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        v.len()
    };
    let inner_slope = (distinct >= 3).then(|| least_squares(&iu, &iy).0);

    // A regression slope within round-off of 0 or 1 is a linear or constant
    // field, not a fractional power.
    if !(alpha > ALPHA_ROUNDOFF && alpha < 1.0 - ALPHA_ROUNDOFF) {
        return Ok(EnvelopeFit {
            alpha,
            k: exp(intercept),
            inner_slope,
            ..not_found
        });
    }

    let envelope = |x: f64| pow(abs(x), alpha);
    let mut k = exp(intercept);
    for (&x, &v) in grid.iter().zip(&s) {
        k = k.min(v / envelope(x));
    }
    // Rounding can leave a sample a few ulps short; nudge k until every sample
    // clears the envelope with enough room for another pow implementation.
    let guard = 1.0 + 16.0 * f64::EPSILON;
    while grid.iter().zip(&s).any(|(&x, &v)| v < k * envelope(x) * guard) {
        k *= 1.0 - 4.0 * f64::EPSILON;
    }
    let violation_margin = grid
        .iter()
        .zip(&s)
        .map(|(&x, &v)| v - k * envelope(x))
        .fold(f64::INFINITY, f64::min);
    let drifting = inner_slope.is_some_and(|m| m - alpha > SLOPE_DRIFT_TOLERANCE);
    Ok(EnvelopeFit {
        found: true,
        k,
        alpha,
        violation_margin,
        degenerate: k < DEGENERATE_GAIN || drifting,
        inner_slope,
    })
}

fn check_gain_exponent(k: f64, alpha: f64) -> Result<()> {
    if !(k > 0.0) {
        return Err(invalid("k", "must be positive"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", "must lie in (0, 1)"));
    }
    Ok(())
}

/// Extinction time `|x0|^(1-alpha) / (k (1-alpha))` of `x' = -k sign(x)|x|^alpha`.
pub fn analytic_settling_time(k: f64, alpha: f64, x0: f64) -> Result<f64> {
    check_gain_exponent(k, alpha)?;
    Ok(pow(abs(x0), 1.0 - alpha) / (k * (1.0 - alpha)))
}

/// Settling-time bound `V0^(1-beta) / (c (1-beta))` for any trajectory whose
/// Lyapunov function satisfies `V' + c V^beta <= 0`.
pub fn lyapunov_settling_bound(v0: f64, c: f64, beta: f64) -> Result<f64> {
    if !(v0 >= 0.0) {
        return Err(invalid("v0", "must be non-negative"));
    }
    check_gain_exponent(c, beta)?;
    Ok(pow(v0, 1.0 - beta) / (c * (1.0 - beta)))
}

/// Outcome of a Lyapunov decrement check.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovCheckReport {
    /// Largest `V' + c V^beta` over the checked samples.
    pub max_residual: f64,
    /// `(t, residual)` for every checked sample with residual above `tol`.
    pub violations: Vec<(f64, f64)>,
    pub checked: usize,
    pub c: f64,
    pub beta: f64,
    pub tol: f64,
}

impl LyapunovCheckReport {
    /// Fraction of checked samples satisfying the decrement (1 when none checked).
    pub fn pass_fraction(&self) -> f64 {
        if self.checked == 0 {
            1.0
        } else {
            1.0 - self.violations.len() as f64 / self.checked as f64
        }
    }
}

/// Decrement check on a sampled series `(times[i], values[i])`. Samples with
/// `V = 0` and samples rejected by `include` are skipped.
pub fn verify_decrement_series<I>(
    times: &[f64],
    values: &[f64],
    c: f64,
    beta: f64,
    tol: f64,
    include: I,
) -> Result<LyapunovCheckReport>
where
    I: Fn(usize) -> bool,
{
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: values.len(),
        });
    }
    if times.len() < 3 {
        return Err(invalid("traj", "need at least 3 samples"));
    }
    let mut report = LyapunovCheckReport {
        max_residual: f64::NEG_INFINITY,
        violations: Vec::new(),
        checked: 0,
        c,
        beta,
        tol,
    };
    for i in 1..times.len() - 1 {
        let v = values[i];
        if v == 0.0 || !include(i) {
            continue;
        }
        let v_dot = (values[i + 1] - values[i - 1]) / (times[i + 1] - times[i - 1]);
        let residual = v_dot + c * pow(v, beta);
        report.checked += 1;
        report.max_residual = report.max_residual.max(residual);
        if residual > tol {
            report.violations.push((times[i], residual));
        }
    }
    Ok(report)
}

/// Checks `V' + c V^beta <= tol` along `traj`, with `V'` from central
/// differences. Snapped samples (`V = 0`) are excluded.
pub fn verify_lyapunov_decrement<V>(
    traj: &Trajectory,
    v: V,
    c: f64,
    beta: f64,
    tol: f64,
) -> Result<LyapunovCheckReport>
where
    V: Fn(&[f64]) -> f64,
{
    let values: Vec<f64> = (0..traj.len()).map(|i| v(traj.state(i))).collect();
    verify_decrement_series(traj.times(), &values, c, beta, tol, |_| true)
}

/// The canonical finite-time flow `x' = -k x |x|^(alpha-1)` in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtsFlow {
    pub k: f64,
    pub alpha: f64,
    pub dim: usize,
}

/// Builds the canonical finite-time flow; the field is 0 at the origin.
pub fn fts_flow(k: f64, alpha: f64, dim: usize) -> Result<FtsFlow> {
    check_gain_exponent(k, alpha)?;
    if dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    Ok(FtsFlow { k, alpha, dim })
}

impl FtsFlow {
    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        x_alpha(x, self.alpha).into_iter().map(|v| -self.k * v).collect()
    }
}

impl VectorField for FtsFlow {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        dx.copy_from_slice(&self.value(x));
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
    use alloc::vec;

    #[test]
    fn slope_of_sqrt_field_diverges() {
        let f = fields::power_law(1.0, 0.5, 1.0).unwrap();
        let trend = check_necessary_condition(&f, 1.0, 64).unwrap();
        assert_eq!(trend.verdict, SlopeVerdict::DivergentSlope);
        assert!(*trend.right.last().unwrap() < DIVERGENCE_THRESHOLD);
    }

    #[test]
    fn slope_of_linear_field_is_finite() {
        let f = fields::linear(1.0, 1.0).unwrap();
        let trend = check_necessary_condition(&f, 1.0, 64).unwrap();
        assert_eq!(trend.verdict, SlopeVerdict::FiniteSlope);
        assert_eq!(trend.limit, Some(-1.0));
    }

    #[test]
    fn slope_of_gaussian_decay_diverges() {
        let f = fields::gaussian_decay().unwrap();
        let trend = check_necessary_condition(&f, 0.5, 64).unwrap();
        assert_eq!(trend.verdict, SlopeVerdict::DivergentSlope);
        // far from the -1e6 threshold: the divergence is only logarithmic
        assert!(*trend.right.last().unwrap() > -20.0);
    }

    #[test]
    fn smooth_nonlinear_field_has_finite_slope() {
        let f = ScalarField::new(|x: f64| -x - x * x * x, -1.0, 1.0).unwrap();
        let trend = check_necessary_condition(&f, 1.0, 40).unwrap();
        assert_eq!(trend.verdict, SlopeVerdict::FiniteSlope);
    }

    #[test]
    fn few_samples_are_inconclusive_for_slow_fields() {
        let f = ScalarField::new(|x: f64| -x + x * sqrt(abs(x)), -1.0, 1.0).unwrap();
        let trend = check_necessary_condition(&f, 1.0, 8).unwrap();
        assert_eq!(trend.verdict, SlopeVerdict::Inconclusive);
    }

    #[test]
    fn window_outside_domain_is_a_domain_error() {
        let f = fields::gaussian_decay().unwrap();
        assert!(matches!(
            check_necessary_condition(&f, 1.0, 16),
            Err(Error::Domain { .. })
        ));
        assert!(check_necessary_condition(&f, 0.5, 4).is_err());
    }

    #[test]
    fn field_must_vanish_at_origin() {
        assert!(ScalarField::new(|x: f64| 1.0 - x, -1.0, 1.0).is_err());
        assert!(ScalarField::new(|x: f64| -x, 0.0, 1.0).is_err());
    }

    #[test]
    fn envelope_recovers_cube_root_law() {
        let f = fields::power_law(1.0, 1.0 / 3.0, 1.0).unwrap();
        let fit = fit_sufficient_envelope(&f, &default_envelope_grid(-1.0, 1.0)).unwrap();
        assert!(fit.found && !fit.degenerate);
        assert!(abs(fit.alpha - 1.0 / 3.0) < 0.02);
        assert!(abs(fit.k - 1.0) < 0.05);
        assert!(fit.violation_margin >= 0.0);
    }

    #[test]
    fn envelope_rejects_linear_field() {
        let f = fields::linear(1.0, 1.0).unwrap();
        let fit = fit_sufficient_envelope(&f, &log_grid(1e-6, 1.0, 64)).unwrap();
        assert!(!fit.found);
        assert!(fit.alpha >= 1.0);
    }

    #[test]
    fn envelope_picks_dominant_term_near_origin() {
        let f = ScalarField::new(|x: f64| -2.0 * sig(x, 0.5) - x, -1.0, 1.0).unwrap();
        let fit = fit_sufficient_envelope(&f, &default_envelope_grid(-1.0, 1.0)).unwrap();
        assert!(fit.found);
        assert!(abs(fit.alpha - 0.5) < 0.05, "alpha {}", fit.alpha);
        assert!(fit.k >= 2.0 - 0.05, "k {}", fit.k);
    }

    #[test]
    fn unstable_field_is_an_error() {
        let f = ScalarField::new(|x: f64| x, -1.0, 1.0).unwrap();
        assert!(matches!(
            fit_sufficient_envelope(&f, &[-0.5, 0.5]),
            Err(Error::NotStable { .. })
        ));
    }

    #[test]
    fn asymmetric_grid_is_rejected() {
        let f = fields::linear(1.0, 1.0).unwrap();
        assert!(fit_sufficient_envelope(&f, &[-0.5, 0.25]).is_err());
        assert!(fit_sufficient_envelope(&f, &[]).is_err());
    }

    #[test]
    fn gaussian_decay_envelope_is_flagged() {
        let f = fields::gaussian_decay().unwrap();
        let fit = fit_sufficient_envelope(&f, &default_envelope_grid(-0.5, 0.5)).unwrap();
        assert!(!fit.found || fit.degenerate || fit.k < DEGENERATE_GAIN, "{fit:?}");
    }

    #[test]
    fn settling_time_closed_form() {
        assert_eq!(analytic_settling_time(1.0, 0.5, 0.0).unwrap(), 0.0);
        assert!(abs(analytic_settling_time(1.0, 0.5, 1.0).unwrap() - 2.0) < 1e-15);
        assert!(abs(analytic_settling_time(2.0, 0.5, 4.0).unwrap() - 2.0) < 1e-15);
        assert!(analytic_settling_time(1.0, 1.0, 1.0).is_err());
        assert!(analytic_settling_time(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn lyapunov_bound_closed_form() {
        assert_eq!(lyapunov_settling_bound(0.0, 1.0, 0.5).unwrap(), 0.0);
        assert!(abs(lyapunov_settling_bound(1.0, 1.0, 0.5).unwrap() - 2.0) < 1e-15);
        let b = lyapunov_settling_bound(0.5, pow(2.0, 0.75), 0.75).unwrap();
        assert!(abs(b - 2.0) < 1e-12, "{b}");
    }

    #[test]
    fn decrement_holds_on_sqrt_flow() {
        let flow = fts_flow(1.0, 0.5, 1).unwrap();
        let traj =
            integrate(&flow, &[1.0], 0.0, 3.0, &StepPolicy::default(), Some(&[0.0])).unwrap();
        let report =
            verify_lyapunov_decrement(&traj, |x| 0.5 * x[0] * x[0], pow(2.0, 0.75), 0.75, 1e-2)
                .unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.max_residual);
        assert!(report.checked > 1000);
    }

    #[test]
    fn constant_trajectory_violates_everywhere() {
        let mut traj = Trajectory::new(1, 0);
        for i in 0..10 {
            traj.push(i as f64 * 0.1, &[1.0], &[]).unwrap();
        }
        let report = verify_lyapunov_decrement(&traj, |x| 0.5 * x[0] * x[0], 1.0, 0.5, 0.0).unwrap();
        assert_eq!(report.violations.len(), report.checked);
        assert_eq!(report.checked, 8);
    }

    #[test]
    fn exponential_decay_cannot_meet_strong_decrement() {
        let f = crate::sim::FnField::new(1, |_, x, dx| dx[0] = -x[0]);
        let traj = integrate(&f, &[0.01], 0.0, 1.0, &StepPolicy::default(), None).unwrap();
        let report =
            verify_lyapunov_decrement(&traj, |x| 0.5 * x[0] * x[0], 10.0, 0.5, 1e-6).unwrap();
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn decrement_needs_three_samples() {
        let mut traj = Trajectory::new(1, 0);
        traj.push(0.0, &[1.0], &[]).unwrap();
        traj.push(1.0, &[1.0], &[]).unwrap();
        assert!(verify_lyapunov_decrement(&traj, |x| x[0], 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn flow_values() {
        let flow = fts_flow(1.0, 0.5, 2).unwrap();
        assert_eq!(flow.value(&[0.0, 0.0]), vec![0.0, 0.0]);
        let v = flow.value(&[3.0, 4.0]);
        let s = sqrt(5.0);
        assert!(abs(v[0] + 3.0 / s) < 1e-15 && abs(v[1] + 4.0 / s) < 1e-15);
        let scalar = fts_flow(2.0, 0.5, 1).unwrap();
        assert!(abs(scalar.value(&[-4.0])[0] - 4.0) < 1e-15);
    }
}
