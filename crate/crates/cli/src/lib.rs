//! Scenario files, runs, sweeps and artifacts for `fts-core`.
//!
//! A [`Scenario`] is loaded from TOML (or picked from the built-ins),
//! validated, integrated by [`run_scenario`], and leaves a CSV trace plus a
//! TOML report behind.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod check;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;
pub mod sweep;
pub mod trace;

pub use error::{Error, Result};
pub use run::{run_scenario, simulate, Check, Outcome, RunResult};
pub use scenario::{load_scenario, parse_scenario, resolve, Scenario};
pub use sweep::sweep;
