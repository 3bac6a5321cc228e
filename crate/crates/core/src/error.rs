use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(
        "power p = {p} is outside the mass-supercritical, energy-subcritical range for N = {n}"
    )]
    PowerOutOfRange { n: usize, p: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no shooting bracket found: {0}")]
    NoBracketFound(String),

    #[error("ground-state shooting did not converge: {0}")]
    NotConverged(String),

    #[error("non-finite field value at t = {t}")]
    NonFiniteField { t: f64 },

    #[error("field has zero mass")]
    ZeroMass,

    #[error("localization radius {radius} needs 2R inside the box half-width {extent}")]
    RadiusExceedsBox { radius: f64, extent: f64 },

    #[error("need at least {needed} checkpoints, got {got}")]
    InsufficientCheckpoints { needed: usize, got: usize },

    #[error("free dispersal insufficient: |e^(-iTΔ)ψ|_(p+1) / |ψ|_(p+1) = {ratio} > {limit}")]
    DispersalInsufficient { ratio: f64, limit: f64 },

    #[error("Gronwall hypothesis fails at t = {t} (margin {margin})")]
    HypothesisFails { t: f64, margin: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
