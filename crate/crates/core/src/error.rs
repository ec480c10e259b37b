use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Adaptive quadrature could not reach its tolerance within the
    /// subdivision budget.
    QuadratureFailure { estimate: f64, error: f64, tol: f64 },
    /// An evaluation was requested outside the admissible range
    /// (e.g. where the mobility is not positive).
    DomainError(&'static str),
    /// Invalid construction input (profile, model, parameters).
    InvalidInput(&'static str),
    /// The second derivative of the flux vanishes on a scanned interval.
    DegenerateFlux { at: f64 },
    /// A trace left the convexity window the splitting solver was built on.
    WindowViolation { value: f64, lo: f64, hi: f64 },
    /// A fan produced non-increasing front speeds.
    NonMonotoneSpeeds { left: f64, right: f64 },
    /// The tracker created more slabs than allowed.
    EventBudgetExceeded { slabs: usize },
    /// Two solutions could not be concatenated.
    MismatchedInterface { l1: f64 },
    /// Connector/absorber parameters failed a feasibility condition.
    InfeasibleParams(&'static str),
    /// A boundary curve needed more crossing events than allowed.
    StallError { events: usize },
    /// The entropic decay did not reach the target before the time cap.
    NotReached { time: f64, distance: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::QuadratureFailure { estimate, error, tol } => write!(
                f,
                "quadrature failed: estimate {estimate:e} with error {error:e} above tolerance {tol:e}"
            ),
            Error::DomainError(msg) => write!(f, "domain error: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::DegenerateFlux { at } => {
                write!(f, "flux is affine on an interval near {at}")
            }
            Error::WindowViolation { value, lo, hi } => {
                write!(f, "value {value} outside convexity window [{lo}, {hi}]")
            }
            Error::NonMonotoneSpeeds { left, right } => write!(
                f,
                "fan speeds not strictly increasing ({left} followed by {right})"
            ),
            Error::EventBudgetExceeded { slabs } => {
                write!(f, "event budget exceeded after {slabs} slabs")
            }
            Error::MismatchedInterface { l1 } => {
                write!(f, "solutions do not join: L1 gap {l1:e}")
            }
            Error::InfeasibleParams(what) => write!(f, "infeasible parameters: {what}"),
            Error::StallError { events } => {
                write!(f, "boundary curve stalled after {events} crossing events")
            }
            Error::NotReached { time, distance } => write!(
                f,
                "decay target not reached by t = {time} (sup distance {distance})"
            ),
        }
    }
}

impl core::error::Error for Error {}
