//! Scenario files.
//!
//! A scenario is a TOML document naming one closed-loop system, its
//! parameters, the initial state, the horizon and the thresholds used to
//! judge the run. Everything is validated when the file is loaded, so a
//! scenario that loads will build.

use std::path::Path;

use fts_core::analysis::{fields, ScalarField};
use fts_core::barrier::{BarrierLoop, BarrierParams};
use fts_core::lti::{auto_gains, CanonicalGains, CanonicalLoop, FullRankLoop, LinearSystem};
use fts_core::reference::{ReferenceTrajectory, SampledTable};
use fts_core::unicycle::{UnicycleGains, UnicycleLoop};
use fts_core::{Method, StepPolicy, VectorField};
use serde::{Deserialize, Serialize};

use crate::builtin;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub t0: f64,
    pub tf: f64,
    /// Echoed into reports; none of the dynamics are random.
    #[serde(default)]
    pub seed: u64,
    pub system: SystemSpec,
    #[serde(default)]
    pub sim: SimSpec,
    #[serde(default)]
    pub settling: SettlingSpec,
    #[serde(default)]
    pub checks: CheckSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSpec {
    ScalarField(ScalarSpec),
    Unicycle(UnicycleSpec),
    SingleIntegratorBarrier(BarrierSpec),
    LtiFullRank(FullRankSpec),
    LtiCanonical(CanonicalSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PowerLaw,
    Linear,
    CounterExample,
}

impl Family {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "power-law" => Some(Self::PowerLaw),
            "linear" => Some(Self::Linear),
            "counter-example" => Some(Self::CounterExample),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PowerLaw => "power-law",
            Self::Linear => "linear",
            Self::CounterExample => "counter-example",
        }
    }

    /// The field on `[-edge, edge]`; the counter-example always lives on `[-1/2, 1/2]`.
    pub fn field(self, k: f64, alpha: f64, edge: f64) -> fts_core::Result<ScalarField> {
        match self {
            Self::PowerLaw => fields::power_law(k, alpha, edge),
            Self::Linear => fields::linear(k, edge),
            Self::CounterExample => fields::gaussian_decay(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarSpec {
    pub family: Family,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "half")]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnicycleSpec {
    pub k: f64,
    pub k_omega: f64,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub reference: ReferenceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReferenceSpec {
    Sinusoid {
        #[serde(default = "one")]
        speed: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        omega: f64,
    },
    Line {
        start: [f64; 2],
        velocity: [f64; 2],
    },
    Circle {
        center: [f64; 2],
        radius: f64,
        omega: f64,
    },
    StaticPoint {
        point: [f64; 2],
    },
    /// Tabulated position, velocity and acceleration columns.
    Sampled {
        t: Vec<f64>,
        x: Vec<f64>,
        y: Vec<f64>,
        vx: Vec<f64>,
        vy: Vec<f64>,
        ax: Vec<f64>,
        ay: Vec<f64>,
    },
}

impl ReferenceSpec {
    pub fn build(&self) -> fts_core::Result<ReferenceTrajectory> {
        Ok(match self {
            Self::Sinusoid { speed, amplitude, omega } => ReferenceTrajectory::Sinusoid {
                speed: *speed,
                amplitude: *amplitude,
                omega: *omega,
            },
            Self::Line { start, velocity } => ReferenceTrajectory::Line {
                start: *start,
                velocity: *velocity,
            },
            Self::Circle { center, radius, omega } => ReferenceTrajectory::Circle {
                center: *center,
                radius: *radius,
                omega: *omega,
            },
            Self::StaticPoint { point } => ReferenceTrajectory::StaticPoint(*point),
            Self::Sampled { t, x, y, vx, vy, ax, ay } => {
                let zip = |a: &[f64], b: &[f64]| -> Vec<[f64; 2]> {
                    a.iter().zip(b).map(|(p, q)| [*p, *q]).collect()
                };
                let n = t.len();
                if [x, y, vx, vy, ax, ay].iter().any(|c| c.len() != n) {
                    return Err(fts_core::Error::DimensionMismatch {
                        expected: n,
                        found: [x, y, vx, vy, ax, ay].iter().map(|c| c.len()).find(|&l| l != n).unwrap_or(n),
                    });
                }
                ReferenceTrajectory::Sampled(SampledTable::new(
                    t.clone(),
                    zip(x, y),
                    zip(vx, vy),
                    zip(ax, ay),
                )?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSpec {
    pub tau: Vec<f64>,
    pub o: Vec<f64>,
    pub rho_o: f64,
    pub d_m: f64,
    pub epsilon: f64,
    pub k1: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullRankSpec {
    /// Row-major `n x n`.
    pub a: Vec<f64>,
    /// Row-major `n x n`.
    pub b: Vec<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalSpec {
    /// Row-major `n x n`, in controllable canonical form.
    pub a: Vec<f64>,
    /// `n x 1`, equal to `e_n`.
    pub b: Vec<f64>,
    pub x1d: f64,
    pub alpha: f64,
    /// `"auto"` or one gain per state.
    #[serde(default)]
    pub gains: GainSpec,
    /// Multiple of the minimum global gain used by `"auto"`.
    #[serde(default = "gain_factor")]
    pub gain_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GainSpec {
    Named(String),
    Explicit(Vec<f64>),
}

impl Default for GainSpec {
    fn default() -> Self {
        Self::Named("auto".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default = "dt")]
    pub dt: f64,
    #[serde(default)]
    pub method: MethodSpec,
    #[serde(default = "snap_radius")]
    pub snap_radius: f64,
    #[serde(default = "regularization")]
    pub regularization: f64,
}

impl Default for SimSpec {
    fn default() -> Self {
        let p = StepPolicy::default();
        Self {
            dt: p.dt,
            method: MethodSpec::Rk4,
            snap_radius: p.snap_radius,
            regularization: p.regularization,
        }
    }
}

impl SimSpec {
    pub fn policy(&self) -> StepPolicy {
        StepPolicy {
            method: match self.method {
                MethodSpec::Rk4 => Method::Rk4,
                MethodSpec::Euler => Method::Euler,
            },
            dt: self.dt,
            snap_radius: self.snap_radius,
            regularization: self.regularization,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodSpec {
    #[default]
    Rk4,
    Euler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettlingSpec {
    #[serde(default = "settle_eps")]
    pub eps: f64,
    /// Defaults to 5% of the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell: Option<f64>,
}

impl Default for SettlingSpec {
    fn default() -> Self {
        Self {
            eps: settle_eps(),
            dwell: None,
        }
    }
}

/// Thresholds behind the pass/fail checks of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    /// Allowed `V' + c V^beta`.
    #[serde(default = "decrement_tol")]
    pub decrement_tol: f64,
    /// Fraction of samples that must satisfy the decrement.
    #[serde(default = "decrement_fraction")]
    pub decrement_fraction: f64,
    /// Allowed sample-to-sample increase of the barrier.
    #[serde(default = "monotone_tol")]
    pub monotone_tol: f64,
    /// Allowed gap between analytic and finite-difference chain derivatives.
    #[serde(default = "chain_tol")]
    pub chain_tol: f64,
    #[serde(default = "chain_fraction")]
    pub chain_fraction: f64,
}

impl Default for CheckSpec {
    fn default() -> Self {
        Self {
            decrement_tol: decrement_tol(),
            decrement_fraction: decrement_fraction(),
            monotone_tol: monotone_tol(),
            chain_tol: chain_tol(),
            chain_fraction: chain_fraction(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Trace file name inside the output directory; `<name>.csv` by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    /// Report file name; `<name>.report.toml` by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn gain_factor() -> f64 {
    1.1
}
fn dt() -> f64 {
    StepPolicy::default().dt
}
fn snap_radius() -> f64 {
    StepPolicy::default().snap_radius
}
fn regularization() -> f64 {
    StepPolicy::default().regularization
}
fn settle_eps() -> f64 {
    1e-2
}
fn decrement_tol() -> f64 {
    1e-2
}
fn decrement_fraction() -> f64 {
    0.99
}
fn monotone_tol() -> f64 {
    1e-6
}
fn chain_tol() -> f64 {
    1e-2
}
fn chain_fraction() -> f64 {
    0.95
}

/// A validated scenario turned into a runnable closed loop.
pub enum Plant {
    Scalar(ScalarLoop),
    Unicycle(UnicycleLoop),
    Barrier(BarrierLoop),
    FullRank(FullRankLoop),
    Canonical(CanonicalLoop),
}

/// `x' = h(x)` for one of the built-in scalar families.
pub struct ScalarLoop {
    pub family: Family,
    pub k: f64,
    pub alpha: f64,
    pub field: ScalarField,
}

impl VectorField for ScalarLoop {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> fts_core::Result<()> {
        dx[0] = self.field.eval(x[0])?;
        Ok(())
    }

    fn non_lipschitz(&self) -> bool {
        self.family != Family::Linear
    }
}

impl Scenario {
    pub fn trace_name(&self) -> String {
        self.output.trace.clone().unwrap_or_else(|| format!("{}.csv", self.name))
    }

    pub fn report_name(&self) -> String {
        self.output
            .report
            .clone()
            .unwrap_or_else(|| format!("{}.report.toml", self.name))
    }

    pub fn dwell(&self) -> f64 {
        self.settling
            .dwell
            .unwrap_or_else(|| fts_core::sim::default_dwell(self.t0, self.tf))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios always serialize")
    }

    /// Checks every invariant and builds the closed loop.
    pub fn build(&self) -> Result<Plant> {
        let fail = |invariant: &'static str, detail: String| Error::Invalid {
            scenario: self.name.clone(),
            invariant,
            detail,
        };
        let core = |invariant: &'static str| move |e: fts_core::Error| fail(invariant, e.to_string());

        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(fail("name", "must be non-empty and usable as a file name".into()));
        }
        if !(self.t0.is_finite() && self.tf.is_finite() && self.tf > self.t0) {
            return Err(fail("horizon", format!("need t0 < tf, got [{}, {}]", self.t0, self.tf)));
        }
        if self.x0.is_empty() || self.x0.iter().any(|v| !v.is_finite()) {
            return Err(fail("initial-state", "x0 must be non-empty and finite".into()));
        }
        self.sim.policy().validate().map_err(core("step-policy"))?;
        if !(self.settling.eps > 0.0) {
            return Err(fail("settling", "eps must be positive".into()));
        }
        let dwell = self.dwell();
        if !(dwell >= 0.0 && dwell <= self.tf - self.t0) {
            return Err(fail("settling", format!("dwell {dwell} must lie within the horizon")));
        }
        let fractions = [self.checks.decrement_fraction, self.checks.chain_fraction];
        if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(fail("checks", "fractions must lie in [0, 1]".into()));
        }

        let delta_or = |d: Option<f64>| d.unwrap_or(self.sim.regularization);
        match &self.system {
            SystemSpec::ScalarField(s) => {
                self.expect_dim(1)?;
                if s.family == Family::PowerLaw && !(s.alpha > 0.0 && s.alpha < 1.0) {
                    return Err(fail("alpha-range", format!("alpha = {} must lie in (0, 1)", s.alpha)));
                }
                if !(s.k > 0.0 && s.k.is_finite()) {
                    return Err(fail("gain", "k must be positive".into()));
                }
                let field = s.family.field(s.k, s.alpha, f64::INFINITY).map_err(core("field"))?;
                let (lo, hi) = field.domain();
                if !(self.x0[0] >= lo && self.x0[0] <= hi) {
                    return Err(fail("field-domain", format!("x0 outside [{lo}, {hi}]")));
                }
                Ok(Plant::Scalar(ScalarLoop {
                    family: s.family,
                    k: s.k,
                    alpha: s.alpha,
                    field,
                }))
            }
            SystemSpec::Unicycle(u) => {
                self.expect_dim(3)?;
                let gains = UnicycleGains::new(u.k, u.k_omega, u.alpha, delta_or(u.delta))
                    .map_err(core("unicycle-gains"))?;
                let reference = u.reference.build().map_err(core("reference"))?;
                reference
                    .validate(self.t0, self.tf)
                    .map_err(core("reference-consistency"))?;
                let sys = UnicycleLoop::new(reference, gains).map_err(core("unicycle-gains"))?;
                sys.heading_error(self.t0, &self.x0).map_err(core("initial-heading"))?;
                Ok(Plant::Unicycle(sys))
            }
            SystemSpec::SingleIntegratorBarrier(b) => {
                let params = BarrierParams::new(
                    b.tau.clone(),
                    b.o.clone(),
                    b.rho_o,
                    b.d_m,
                    b.epsilon,
                    b.k1,
                    b.alpha,
                )
                .map_err(|e| {
                    let invariant = match &e {
                        fts_core::Error::InvalidParameter { name: "o", .. } => "obstacle-separation",
                        fts_core::Error::InvalidParameter { name: "alpha", .. } => "alpha-range",
                        _ => "barrier-parameters",
                    };
                    fail(invariant, e.to_string())
                })?;
                self.expect_dim(params.dim())?;
                let sys = BarrierLoop::new(params).map_err(core("barrier-parameters"))?;
                sys.check_initial(&self.x0).map_err(|e| match e {
                    fts_core::Error::SafetyViolated { .. } => fail("safe-start", e.to_string()),
                    _ => fail("exclusion-ray", e.to_string()),
                })?;
                Ok(Plant::Barrier(sys))
            }
            SystemSpec::LtiFullRank(l) => {
                let n = self.x0.len();
                if l.a.len() != n * n || l.b.len() != n * n {
                    return Err(fail(
                        "dimension",
                        format!("A and B must both be {n} x {n} (row-major) for x0 of length {n}"),
                    ));
                }
                let sys = LinearSystem::from_row_major(n, &l.a, &l.b).map_err(core("dimension"))?;
                let lp = FullRankLoop::new(sys, l.alpha).map_err(|e| {
                    let invariant = match e {
                        fts_core::Error::InvalidParameter { name: "alpha", .. } => "alpha-range",
                        _ => "full-rank-input",
                    };
                    fail(invariant, e.to_string())
                })?;
                Ok(Plant::FullRank(lp))
            }
            SystemSpec::LtiCanonical(c) => {
                let n = self.x0.len();
                if c.a.len() != n * n || c.b.len() != n {
                    return Err(fail(
                        "dimension",
                        format!("A must be {n} x {n} and B {n} x 1 for x0 of length {n}"),
                    ));
                }
                let sys = LinearSystem::from_row_major(n, &c.a, &c.b).map_err(core("dimension"))?;
                if !sys.is_canonical() {
                    return Err(fail(
                        "canonical-form",
                        "A must be a companion matrix (integrator chain plus coefficient row) and B = e_n".into(),
                    ));
                }
                let lower = (n as f64 - 1.0) / n as f64;
                if !(c.alpha > lower && c.alpha < 1.0) {
                    return Err(fail(
                        "alpha-range",
                        format!("alpha = {} must lie in ({lower}, 1) for n = {n}", c.alpha),
                    ));
                }
                let delta = delta_or(c.delta);
                let gains = match &c.gains {
                    GainSpec::Named(s) if s == "auto" => {
                        auto_gains(&self.x0, c.x1d, c.alpha, c.gain_factor, delta)
                            .map_err(core("gain-threshold"))?
                    }
                    GainSpec::Named(s) => {
                        return Err(fail("gains", format!("expected \"auto\" or a list, got \"{s}\"")))
                    }
                    GainSpec::Explicit(k) => {
                        CanonicalGains::new(k.clone(), c.alpha, delta).map_err(core("gains"))?
                    }
                };
                let lp = CanonicalLoop::new(sys, c.x1d, gains).map_err(core("canonical-form"))?;
                Ok(Plant::Canonical(lp))
            }
        }
    }

    fn expect_dim(&self, n: usize) -> Result<()> {
        if self.x0.len() == n {
            Ok(())
        } else {
            Err(Error::Invalid {
                scenario: self.name.clone(),
                invariant: "dimension",
                detail: format!("x0 has {} entries, the system has {n} states", self.x0.len()),
            })
        }
    }
}

/// Parses and validates a scenario document. `origin` names the source in
/// diagnostics.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| {
        // Internally tagged tables are buffered before deserialization, which
        // drops spans; re-read `[system]` directly to locate the fault.
        let e = system_error(text).unwrap_or(e);
        let (line, column) = e
            .span()
            .map(|s| line_column(text, s.start))
            .unwrap_or((0, 0));
        Error::Parse {
            origin: origin.to_string(),
            line,
            column,
            message: e.message().trim_end().to_string(),
        }
    })?;
    scenario.build()?;
    Ok(scenario)
}

fn system_error(text: &str) -> Option<toml::de::Error> {
    use serde::de::Deserialize as _;
    use toml::de::{DeTable, DeValue, Deserializer};

    let root = DeTable::parse(text).ok()?;
    let (_, system) = root.get_ref().iter().find(|(k, _)| k.get_ref() == "system")?;
    let DeValue::Table(table) = system.get_ref() else {
        return None;
    };
    let mut kind = None;
    let mut rest = DeTable::new();
    for (k, v) in table.iter() {
        match (k.get_ref().as_ref(), v.get_ref()) {
            ("kind", DeValue::String(s)) => kind = Some(s.to_string()),
            _ => {
                rest.insert(k.clone(), v.clone());
            }
        }
    }
    let de = Deserializer::from(toml::Spanned::new(system.span(), rest));
    match kind?.as_str() {
        "scalar-field" => ScalarSpec::deserialize(de).err(),
        "unicycle" => UnicycleSpec::deserialize(de).err(),
        "single-integrator-barrier" => BarrierSpec::deserialize(de).err(),
        "lti-full-rank" => FullRankSpec::deserialize(de).err(),
        "lti-canonical" => CanonicalSpec::deserialize(de).err(),
        _ => None,
    }
}

/// 1-based line and column of byte `offset`.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

/// A file path, or the name of a built-in scenario when no such file exists.
pub fn resolve(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.exists() {
        return load_scenario(path);
    }
    match builtin::source(arg) {
        Some(text) => parse_scenario(text, arg),
        None => Err(Error::UnknownScenario(arg.to_string())),
    }
}
