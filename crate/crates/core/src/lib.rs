//! Finite-time stabilizing controllers and the numerical tooling around them.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! - [`sim`]: a fixed-step integrator that snaps finite-time flows onto their
//!   equilibrium, plus settling-time detection;
//! - [`analysis`]: slope and envelope checks for scalar fields, Lyapunov
//!   decrement verification along trajectories and closed-form settling times;
//! - [`unicycle`], [`barrier`], [`lti`]: the controllers and their closed loops.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod barrier;
pub mod error;
pub mod jet;
pub mod lti;
pub mod math;
pub mod reference;
pub mod sim;
pub mod unicycle;

pub use error::{Error, Result};
pub use sim::{
    detect_settling, detect_settling_by, integrate, FnField, Method, SettlingReport, StepPolicy,
    Trajectory, VectorField,
};
