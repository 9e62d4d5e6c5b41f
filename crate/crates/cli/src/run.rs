//! Running a scenario: integrate, measure, check, write artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fts_core::analysis::{analytic_settling_time, verify_decrement_series, LyapunovCheckReport};
use fts_core::barrier::{barrier_gradient, barrier_value};
use fts_core::error::at_time;
use fts_core::lti::composite_lyapunov;
use fts_core::math::{dist, norm, pow};
use fts_core::{detect_settling, detect_settling_by, integrate, SettlingReport, Trajectory};

use crate::error::{io, Error, Result};
use crate::report;
use crate::scenario::{Family, Plant, Scenario};
use crate::trace::{self, Columns};

/// One named pass/fail judgement of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub scenario: String,
    pub seed: u64,
    pub trace_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub settling: SettlingReport,
    pub lyapunov: Option<LyapunovCheckReport>,
    /// Module-specific scalars: safety margin, max |u|, certificate residuals, ...
    pub extras: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl RunResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extras.get(key).copied()
    }
}

/// A finished run kept in memory.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: RunResult,
    pub trajectory: Trajectory,
    pub columns: Columns,
}

impl Outcome {
    pub fn render_trace(&self) -> String {
        trace::render(&self.trajectory, &self.columns)
    }
}

/// Integrates and judges the scenario without touching the file system.
pub fn simulate(s: &Scenario) -> Result<Outcome> {
    let plant = s.build()?;
    let failed = |source: fts_core::Error| Error::Run {
        scenario: s.name.clone(),
        source,
    };
    let run = Runner::new(s);
    match &plant {
        Plant::Scalar(sys) => run.scalar(sys),
        Plant::Unicycle(sys) => run.unicycle(sys),
        Plant::Barrier(sys) => run.barrier(sys),
        Plant::FullRank(sys) => run.full_rank(sys),
        Plant::Canonical(sys) => run.canonical(sys),
    }
    .map_err(failed)
}

/// [`simulate`], then writes the trace and the report into `out_dir`.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<RunResult> {
    let mut outcome = simulate(s)?;
    std::fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let trace_path = out_dir.join(s.trace_name());
    let report_path = out_dir.join(s.report_name());
    trace::write(&trace_path, &outcome.trajectory, &outcome.columns)?;
    outcome.result.trace_path = Some(trace_path);
    outcome.result.report_path = Some(report_path.clone());
    std::fs::write(&report_path, report::render(&outcome.result)).map_err(io(&report_path))?;
    Ok(outcome.result)
}

struct Runner<'a> {
    s: &'a Scenario,
    extras: BTreeMap<String, f64>,
    checks: Vec<Check>,
}

type Step = fts_core::Result<Outcome>;

impl<'a> Runner<'a> {
    fn new(s: &'a Scenario) -> Self {
        Self {
            s,
            extras: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    fn integrate<F: fts_core::VectorField>(&self, f: &F, eq: Option<&[f64]>) -> fts_core::Result<Trajectory> {
        integrate(f, &self.s.x0, self.s.t0, self.s.tf, &self.s.sim.policy(), eq)
    }

    fn extra(&mut self, key: &str, value: f64) {
        self.extras.insert(key.to_string(), value);
    }

    fn check(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }

    fn settle_to(&self, traj: &Trajectory, target: &[f64]) -> fts_core::Result<SettlingReport> {
        detect_settling(traj, target, self.s.settling.eps, self.s.dwell())
    }

    fn decrement(
        &mut self,
        traj: &Trajectory,
        values: &[f64],
        c: f64,
        beta: f64,
        include: impl Fn(usize) -> bool,
    ) -> fts_core::Result<LyapunovCheckReport> {
        let report =
            verify_decrement_series(traj.times(), values, c, beta, self.s.checks.decrement_tol, include)?;
        let need = self.s.checks.decrement_fraction;
        self.check(
            "lyapunov-decrement",
            report.pass_fraction() >= need,
            format!(
                "{:.4} of {} samples within {:e} (need {need})",
                report.pass_fraction(),
                report.checked,
                report.tol
            ),
        );
        Ok(report)
    }

    fn max_abs_u(&mut self, traj: &Trajectory) {
        if traj.control_dim() == 0 {
            return;
        }
        let max = (0..traj.len())
            .flat_map(|i| traj.control(i).iter().copied())
            .fold(0.0, |m: f64, u| if u.is_finite() { m.max(u.abs()) } else { f64::NAN });
        self.extra("max_abs_u", max);
    }

    fn finish(
        mut self,
        traj: Trajectory,
        columns: Columns,
        settling: SettlingReport,
        lyapunov: Option<LyapunovCheckReport>,
    ) -> Step {
        self.checks.insert(
            0,
            Check {
                name: "settled",
                passed: settling.settled,
                detail: match settling.time {
                    Some(t) => format!("inside {:e} from t = {t}", settling.eps),
                    None => format!("not inside {:e} for the last {} s", settling.eps, settling.dwell),
                },
            },
        );
        self.max_abs_u(&traj);
        if let Some(i) = traj.snapped_at() {
            self.extra("snap_time", traj.time(i));
        }
        let result = RunResult {
            scenario: self.s.name.clone(),
            seed: self.s.seed,
            trace_path: None,
            report_path: None,
            settling,
            lyapunov,
            extras: self.extras,
            checks: self.checks,
            warnings: traj.warnings().to_vec(),
        };
        Ok(Outcome {
            result,
            trajectory: traj,
            columns,
        })
    }

    fn scalar(mut self, sys: &crate::scenario::ScalarLoop) -> Step {
        let traj = self.integrate(sys, Some(&[0.0]))?;
        let v: Vec<f64> = traj.iter().map(|(_, x, _)| 0.5 * x[0] * x[0]).collect();
        let mut columns = Columns::new(vec!["V".into()]);
        v.iter().for_each(|&x| columns.push(vec![x]));
        let settling = self.settle_to(&traj, &[0.0])?;
        let mut lyapunov = None;
        if sys.family == Family::PowerLaw {
            // V = x^2/2 gives V' = -k 2^beta V^beta with beta = (1 + alpha)/2
            let beta = 0.5 * (1.0 + sys.alpha);
            lyapunov = Some(self.decrement(&traj, &v, sys.k * pow(2.0, beta), beta, |_| true)?);
            if self.s.x0[0] != 0.0 {
                let t = analytic_settling_time(sys.k, sys.alpha, self.s.x0[0])?;
                self.extra("analytic_settling_time", self.s.t0 + t);
            }
        }
        self.finish(traj, columns, settling, lyapunov)
    }

    fn unicycle(mut self, sys: &fts_core::unicycle::UnicycleLoop) -> Step {
        let traj = self.integrate(sys, None)?;
        let mut columns = Columns::new(vec!["pos_err".into(), "heading_err".into()]);
        for (t, q, _) in traj.iter() {
            let h = sys.heading_error(t, q).map_err(|e| at_time(t, e))?;
            columns.push(vec![sys.position_error_norm(t, q), h]);
        }
        let (eps, dwell) = (self.s.settling.eps, self.s.dwell());
        let heading = |t: f64, q: &[f64]| sys.heading_error(t, q).map_or(f64::INFINITY, f64::abs);
        let pos = detect_settling_by(&traj, |t, q| sys.position_error_norm(t, q), eps, dwell)?;
        let head = detect_settling_by(&traj, heading, eps, dwell)?;
        let both = detect_settling_by(&traj, |t, q| sys.position_error_norm(t, q).max(heading(t, q)), eps, dwell)?;
        if let Some(t) = pos.time {
            self.extra("position_settling_time", t);
        }
        if let Some(t) = head.time {
            self.extra("heading_settling_time", t);
        }
        let v: Vec<f64> = columns.rows.iter().map(|r| 0.5 * r[1] * r[1]).collect();
        let (c, beta) = sys.gains.heading_decrement();
        let delta = sys.gains.delta;
        let lyapunov = self.decrement(&traj, &v, c, beta, |i| columns.rows[i][0] > delta)?;
        self.finish(traj, columns, both, Some(lyapunov))
    }

    fn barrier(mut self, sys: &fts_core::barrier::BarrierLoop) -> Step {
        let p = &sys.params;
        let traj = self.integrate(sys, Some(&p.tau))?;
        let mut columns = Columns::new(vec!["B".into(), "normGradB".into(), "margin".into()]);
        for (t, x, _) in traj.iter() {
            let b = barrier_value(x, p).map_err(|e| at_time(t, e))?;
            let g = barrier_gradient(x, p).map_err(|e| at_time(t, e))?;
            columns.push(vec![b, norm(&g), dist(x, &p.o) - p.d_c()]);
        }
        let settling = self.settle_to(&traj, &p.tau)?;
        let margin = columns.rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
        let rise = columns
            .rows
            .windows(2)
            .map(|w| w[1][0] - w[0][0])
            .fold(f64::NEG_INFINITY, f64::max);
        self.extra("safety_margin", margin);
        self.extra("max_barrier_increase", rise);
        self.check("safety", margin >= 0.0, format!("minimum margin {margin}"));
        let tol = self.s.checks.monotone_tol;
        self.check(
            "barrier-monotone",
            rise <= tol,
            format!("largest step increase {rise:e} (tolerance {tol:e})"),
        );
        self.finish(traj, columns, settling, None)
    }

    fn full_rank(mut self, sys: &fts_core::lti::FullRankLoop) -> Step {
        let n = self.s.x0.len();
        let origin = vec![0.0; n];
        let traj = self.integrate(sys, Some(&origin))?;
        let v: Vec<f64> = traj.iter().map(|(_, x, _)| sys.cert.lyapunov_value(x)).collect();
        let mut columns = Columns::new(vec!["V".into()]);
        v.iter().for_each(|&x| columns.push(vec![x]));
        let settling = self.settle_to(&traj, &origin)?;
        let cert = &sys.cert;
        self.extra("certificate_residual", cert.residual);
        self.extra("spectral_abscissa", cert.spectral_abscissa);
        self.extra("lambda_min_p", cert.lambda_min_p);
        self.extra("lambda_max_p", cert.lambda_max_p);
        self.check(
            "certificate",
            cert.residual < 1e-8 && cert.spectral_abscissa < 0.0,
            format!("residual {:e}, abscissa {}", cert.residual, cert.spectral_abscissa),
        );
        let (c, beta) = cert.decrement_constants(sys.alpha);
        let lyapunov = self.decrement(&traj, &v, c, beta, |_| true)?;
        self.finish(traj, columns, settling, Some(lyapunov))
    }

    fn canonical(mut self, sys: &fts_core::lti::CanonicalLoop) -> Step {
        let target = sys.target();
        let traj = self.integrate(sys, Some(&target))?;
        let n = target.len();
        let mut names = vec!["V".to_string()];
        names.extend((1..=n).map(|i| format!("xd{i}")));
        names.extend((1..=n).map(|i| format!("xd_dot{i}")));
        names.push("regularized".into());
        let mut columns = Columns::new(names);
        for (t, x, _) in traj.iter() {
            let chain = sys.chain(x).map_err(|e| at_time(t, e))?;
            let mut row = vec![composite_lyapunov(x, &chain)];
            row.extend(&chain.xd);
            row.extend(&chain.xd_dot);
            row.push(if chain.regularized { 1.0 } else { 0.0 });
            columns.push(row);
        }
        let settling = self.settle_to(&traj, &target)?;
        self.extra("gain", sys.gains.k()[0]);

        let (fraction, checked) = chain_agreement(traj.times(), &columns, n, self.s.checks.chain_tol);
        self.extra("chain_fd_fraction", fraction);
        self.extra("chain_fd_checked", checked as f64);
        let need = self.s.checks.chain_fraction;
        self.check(
            "chain-derivatives",
            checked > 0 && fraction >= need,
            format!("{fraction:.4} of {checked} comparisons within {:e} (need {need})", self.s.checks.chain_tol),
        );
        let finite = (0..traj.len()).all(|i| traj.control(i)[0].is_finite());
        self.check("finite-input", finite, "u finite at every sample".into());
        self.finish(traj, columns, settling, None)
    }
}

/// Compares the recorded analytic derivatives `xd_dot_i` with central
/// differences of the recorded `xd_i`, for `i = 2..n`, away from samples in
/// the regularization zone. Returns the pass fraction and the number of
/// comparisons.
pub fn chain_agreement(times: &[f64], columns: &Columns, n: usize, tol: f64) -> (f64, usize) {
    let xd = |i: usize, level: usize| columns.rows[i][1 + level];
    let xd_dot = |i: usize, level: usize| columns.rows[i][1 + n + level];
    let regularized = |i: usize| columns.rows[i][1 + 2 * n] != 0.0;
    let (mut checked, mut passed) = (0usize, 0usize);
    for i in 1..times.len().saturating_sub(1) {
        if regularized(i - 1) || regularized(i) || regularized(i + 1) {
            continue;
        }
        let h = times[i + 1] - times[i - 1];
        for level in 1..n {
            let numeric = (xd(i + 1, level) - xd(i - 1, level)) / h;
            checked += 1;
            if (numeric - xd_dot(i, level)).abs() < tol {
                passed += 1;
            }
        }
    }
    let fraction = if checked == 0 { 0.0 } else { passed as f64 / checked as f64 };
    (fraction, checked)
}
