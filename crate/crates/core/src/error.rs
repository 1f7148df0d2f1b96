use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` must be a finite non-negative number, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },

    #[error("nonlocal solvability requires b/(2*lambda^2) < 1, got b/(2*lambda^2) = {ratio}")]
    NonlocalConditionViolated { ratio: f64 },

    #[error("local mode requires lambda = 0, got {lambda}")]
    LocalRequiresZeroLambda { lambda: f64 },

    #[error("nonlocal mode requires lambda > 0")]
    NonlocalRequiresPositiveLambda,

    #[error("grid interval count must be even, got {n}")]
    OddN { n: usize },

    #[error("grid needs at least 8 intervals, got {n}")]
    TooCoarse { n: usize },

    #[error("grid half-width must be finite and positive, got {alpha}")]
    InvalidHalfWidth { alpha: f64 },

    #[error("truncation level theta must lie in [0, 1/3), got {theta}")]
    ThetaOutOfRange { theta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in field `{field}`")]
    NonFiniteValue { field: String },

    #[error("cubic bracket check failed: p({lo}) = {p_lo}, p({hi}) = {p_hi}")]
    BracketInvalid {
        lo: f64,
        hi: f64,
        p_lo: f64,
        p_hi: f64,
    },

    #[error("integrator step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("upper end of the speed bracket does not converge (last tried sigma = {sigma_hi})")]
    BracketFailure { sigma_hi: f64 },

    #[error("shooting was inconclusive at sigma = {sigma}")]
    InconclusiveRegion { sigma: f64 },

    #[error("sigma = {sigma} does not yield a heteroclinic connection")]
    NotAdmissible { sigma: f64 },

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error(
        "potential update is not contracting after {iterations} iterations (change {change:e})"
    )]
    PicardNotContracting { iterations: usize, change: f64 },

    #[error("wave speed update stalled after {iterations} iterations (pinning defect {defect:e})")]
    SecantStalled { iterations: usize, defect: f64 },

    #[error("continuation broke at {stage}: {reason}")]
    ContinuationBroken { stage: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status for the command-line tool: 2 for rejected input,
    /// 4 for an inconclusive shooting region, 5 for a numerical or i/o failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NegativeParameter { .. }
            | Error::NonlocalConditionViolated { .. }
            | Error::LocalRequiresZeroLambda { .. }
            | Error::NonlocalRequiresPositiveLambda
            | Error::OddN { .. }
            | Error::TooCoarse { .. }
            | Error::InvalidHalfWidth { .. }
            | Error::ThetaOutOfRange { .. }
            | Error::InvalidArgument(_)
            | Error::Parse(_) => 2,
            Error::InconclusiveRegion { .. } => 4,
            _ => 5,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
