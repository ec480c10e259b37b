use std::fmt;

/// A failed run, classified by the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad scenario, unreadable input, infeasible parameters: exit 2.
    Validation(String),
    /// The numerics did not converge or hit a budget: exit 3.
    Numerical(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation failure: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<shockcost_core::Error> for CliError {
    fn from(e: shockcost_core::Error) -> Self {
        use shockcost_core::Error as E;
        match e {
            E::InvalidInput(_)
            | E::DomainError(_)
            | E::DegenerateFlux { .. }
            | E::WindowViolation { .. }
            | E::InfeasibleParams(_) => CliError::Validation(e.to_string()),
            E::QuadratureFailure { .. }
            | E::NonMonotoneSpeeds { .. }
            | E::EventBudgetExceeded { .. }
            | E::MismatchedInterface { .. }
            | E::StallError { .. }
            | E::NotReached { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(format!("JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
