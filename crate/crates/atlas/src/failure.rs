//! Failure classes and their process exit codes.

use nls_core::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Bad configuration or usage (exit 2).
    Config(String),
    /// Ground-state solver did not converge (exit 3).
    Solver(String),
    /// Checks ran and some failed (exit 1).
    Checks(String),
    /// Anything else (exit 1).
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Checks(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Solver(m) => write!(f, "solver did not converge: {m}"),
            Failure::Checks(m) => write!(f, "checks failed: {m}"),
            Failure::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PowerOutOfRange { .. }
            | Error::InvalidGrid(_)
            | Error::InvalidArgument(_)
            | Error::PreconditionViolated(_)
            | Error::RadiusExceedsBox { .. }
            | Error::DispersalInsufficient { .. } => Failure::Config(e.to_string()),
            Error::NoBracketFound(_) | Error::NotConverged(_) => Failure::Solver(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}
