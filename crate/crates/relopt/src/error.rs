//! Crate-wide error type.

use std::fmt;

/// Errors produced by model construction, integration and optimization.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter set violates one of its structural assumptions.
    InvalidParams(String),
    /// An argument fell outside its mathematical domain.
    Domain(String),
    /// The state left the invariant region by more than the tolerance.
    BlowUp { t: f64, value: f64 },
    /// The adaptive step size underflowed before reaching the end of the span.
    StepFailure { t: f64, h: f64 },
    /// Two trajectories do not share the requested time span.
    SpanMismatch { requested: (f64, f64), available: (f64, f64) },
    /// The Poincare displacement map has no sign change in (0, 1).
    NoInteriorZero,
    /// The control weight is non-positive somewhere on the requested range.
    SingularWeight { p: f64, g: f64 },
    /// A cost value exceeds the resolvable range of the potential table.
    OutOfRange { requested: f64, max: f64, saturation: f64 },
    /// No release amount within the theoretical bound achieves replacement.
    NoFeasibleC { t0: f64, c_max: f64 },
    /// No rectangular pulse under the rate bound satisfies the constraint.
    Infeasible { rate_bound: f64 },
    /// An operation precondition does not hold for the supplied inputs.
    PreconditionFailed(String),
    /// Configuration file parse or validation failure.
    Config(String),
    /// Filesystem failure while writing artifacts.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::BlowUp { t, value } => {
                write!(f, "solution left the admissible region at t = {t} (value {value})")
            }
            Error::StepFailure { t, h } => {
                write!(f, "step size underflow at t = {t} (h = {h:e})")
            }
            Error::SpanMismatch { requested, available } => write!(
                f,
                "span [{}, {}] not covered by trajectory span [{}, {}]",
                requested.0, requested.1, available.0, available.1
            ),
            Error::NoInteriorZero => {
                write!(f, "no interior periodic solution found (no sign change of P - Id)")
            }
            Error::SingularWeight { p, g } => {
                write!(f, "control weight g({p}) = {g} is not strictly positive")
            }
            Error::OutOfRange { requested, max, saturation } => write!(
                f,
                "cost value {requested} exceeds resolvable maximum {max} (saturates at p = {saturation})"
            ),
            Error::NoFeasibleC { t0, c_max } => write!(
                f,
                "no feasible release amount at t0 = {t0} up to C = {c_max}; check envelope and integrator"
            ),
            Error::Infeasible { rate_bound } => {
                write!(f, "no feasible pulse under rate bound M = {rate_bound}")
            }
            Error::PreconditionFailed(msg) => write!(f, "precondition failed: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
