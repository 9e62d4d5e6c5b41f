//! One-parameter sweeps over a scenario.

use std::path::Path;

use rayon::prelude::*;
use toml::Value;

use crate::error::{Error, Result};
use crate::run::{run_scenario, simulate, Outcome, RunResult};
use crate::scenario::Scenario;

/// Copy of `s` with the numeric field at dotted `path` set to `value`.
/// Array elements are addressed by index, e.g. `x0.1`.
pub fn with_parameter(s: &Scenario, path: &str, value: f64) -> Result<Scenario> {
    let unknown = || Error::UnknownParameter(path.to_string());
    let mut doc = Value::try_from(s).expect("scenarios always serialize");
    let mut slot = &mut doc;
    for key in path.split('.') {
        slot = match slot {
            Value::Table(t) => t.get_mut(key),
            Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get_mut(i)),
            _ => None,
        }
        .ok_or_else(unknown)?;
    }
    match slot {
        Value::Float(_) | Value::Integer(_) => *slot = Value::Float(value),
        _ => return Err(unknown()),
    }
    let text = toml::to_string(&doc).expect("edited scenarios serialize");
    crate::scenario::parse_scenario(&text, &format!("{} with {path} = {value}", s.name))
}

/// The scenarios of a sweep, each with its own output file names.
pub fn variants(s: &Scenario, path: &str, values: &[f64]) -> Result<Vec<Scenario>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut variant = with_parameter(s, path, v)?;
            variant.output.trace = Some(format!("{}.sweep{i}.csv", s.name));
            variant.output.report = Some(format!("{}.sweep{i}.report.toml", s.name));
            Ok(variant)
        })
        .collect()
}

/// Runs every variant in parallel; results come back in input order.
pub fn sweep(s: &Scenario, path: &str, values: &[f64], out_dir: &Path) -> Result<Vec<RunResult>> {
    let runs = variants(s, path, values)?;
    runs.par_iter().map(|v| run_scenario(v, out_dir)).collect()
}

/// In-memory [`sweep`].
pub fn sweep_in_memory(s: &Scenario, path: &str, values: &[f64]) -> Result<Vec<Outcome>> {
    let runs = variants(s, path, values)?;
    runs.par_iter().map(simulate).collect()
}

/// Fixed-width table of settling times, one line per value.
pub fn summary(path: &str, values: &[f64], results: &[RunResult]) -> String {
    let mut out = format!("{path:>16}  settled  {:>22}  {:>22}\n", "settling_time", "analytic");
    for (v, r) in values.iter().zip(results) {
        let t = r.settling.time.map_or("-".to_string(), |t| format!("{t:.15e}"));
        let a = r
            .extra("analytic_settling_time")
            .map_or("-".to_string(), |t| format!("{t:.15e}"));
        out.push_str(&format!("{v:>16}  {:>7}  {t:>22}  {a:>22}\n", r.settling.settled));
    }
    out
}
