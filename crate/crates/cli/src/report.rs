//! Run summaries as TOML key-value documents. Every threshold that decided a
//! check is echoed next to its outcome.

use toml::{Table, Value};

use crate::run::RunResult;

pub fn to_table(r: &RunResult) -> Table {
    let mut root = Table::new();
    root.insert("scenario".into(), r.scenario.clone().into());
    root.insert("seed".into(), Value::Integer(r.seed as i64));
    root.insert("passed".into(), r.passed().into());
    if let Some(p) = &r.trace_path {
        root.insert("trace".into(), p.display().to_string().into());
    }
    root.insert(
        "warnings".into(),
        Value::Array(r.warnings.iter().map(|w| w.clone().into()).collect()),
    );

    let mut settling = Table::new();
    settling.insert("settled".into(), r.settling.settled.into());
    if let Some(t) = r.settling.time {
        settling.insert("time".into(), t.into());
    }
    settling.insert("eps".into(), r.settling.eps.into());
    settling.insert("dwell".into(), r.settling.dwell.into());
    root.insert("settling".into(), settling.into());

    if let Some(l) = &r.lyapunov {
        let mut t = Table::new();
        t.insert("c".into(), l.c.into());
        t.insert("beta".into(), l.beta.into());
        t.insert("tol".into(), l.tol.into());
        t.insert("checked".into(), Value::Integer(l.checked as i64));
        t.insert("violations".into(), Value::Integer(l.violations.len() as i64));
        t.insert("pass_fraction".into(), l.pass_fraction().into());
        t.insert("max_residual".into(), l.max_residual.into());
        root.insert("lyapunov".into(), t.into());
    }

    let extras: Table = r.extras.iter().map(|(k, v)| (k.clone(), Value::Float(*v))).collect();
    root.insert("extras".into(), extras.into());

    let mut checks = Table::new();
    for c in &r.checks {
        let mut t = Table::new();
        t.insert("passed".into(), c.passed.into());
        t.insert("detail".into(), c.detail.clone().into());
        checks.insert(c.name.into(), t.into());
    }
    root.insert("checks".into(), checks.into());
    root
}

pub fn render(r: &RunResult) -> String {
    toml::to_string(&to_table(r)).expect("report tables always serialize")
}
