use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

/// Errors raised by the controllers, checkers and the integrator.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    InvalidParameter { name: &'static str, reason: String },
    /// Dimensions of the inputs do not agree.
    DimensionMismatch { expected: usize, found: usize },
    /// The vector field produced a non-finite derivative.
    IntegrationFailure { time: f64 },
    /// Dwell window longer than the recorded horizon.
    NotEnoughHorizon { dwell: f64, horizon: f64 },
    /// A scalar field could not be evaluated (non-finite or outside its domain).
    Domain { x: f64 },
    /// `sign(x) h(x) > 0` somewhere on the grid.
    NotStable { x: f64 },
    /// The vector field driving the unicycle vanished, so its heading is undefined.
    DegenerateField { norm: f64 },
    /// The barrier denominator is not positive.
    SafetyViolated { distance: f64 },
    /// Barrier gradient requested at the obstacle center.
    SingularPoint,
    /// A matrix that must have full rank does not.
    RankDeficient { rank: usize, required: usize },
    /// The pair (A, B) is not controllable.
    NotControllable,
    /// A derivative of the desired chain overflowed.
    ChainOverflow { depth: usize },
    /// A fixed-point iteration did not settle.
    NoConvergence { iterations: usize },
    /// An error raised while evaluating the closed loop at simulation time `time`.
    Simulation { time: f64, source: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IntegrationFailure { time } => {
                write!(f, "integration failure: non-finite derivative at t = {time}")
            }
            Error::NotEnoughHorizon { dwell, horizon } => {
                write!(f, "dwell {dwell} s exceeds the recorded horizon {horizon} s")
            }
            Error::Domain { x } => write!(f, "field not evaluable at x = {x}"),
            Error::NotStable { x } => write!(f, "x h(x) > 0 at x = {x}"),
            Error::DegenerateField { norm } => {
                write!(f, "degenerate guidance field (norm {norm:e})")
            }
            Error::SafetyViolated { distance } => {
                write!(f, "safety violated: barrier denominator {distance} is not positive")
            }
            Error::SingularPoint => write!(f, "barrier gradient is singular at the obstacle center"),
            Error::RankDeficient { rank, required } => {
                write!(f, "rank {rank} below required {required}")
            }
            Error::NotControllable => write!(f, "system is not controllable"),
            Error::ChainOverflow { depth } => {
                write!(f, "desired chain produced a non-finite value at depth {depth}")
            }
            Error::NoConvergence { iterations } => {
                write!(f, "fixed-point iteration did not converge in {iterations} iterations")
            }
            Error::Simulation { time, source } => write!(f, "at t = {time}: {source}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Simulation { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Tags `err` with the simulation time at which it was raised.
pub fn at_time(time: f64, err: Error) -> Error {
    match err {
        Error::Simulation { .. } | Error::IntegrationFailure { .. } => err,
        other => Error::Simulation {
            time,
            source: Box::new(other),
        },
    }
}
