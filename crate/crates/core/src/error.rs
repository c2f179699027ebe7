use thiserror::Error;

/// Errors raised by the numerical routines and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular exponent out of range: gamma = {0} (need gamma > 1)")]
    GammaOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(
        "local expansion outside its validity window at t = {t}: relative correction {ratio:.3e} > 0.1"
    )]
    ExpansionWindow { t: f64, ratio: f64 },

    #[error("integration truncated: {max_steps} steps exhausted at t = {t}")]
    StepLimit { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("tangent-line test failed: v'(t0) t0 / v(t0) = {ratio} (must exceed 1)")]
    TangentTest { ratio: f64 },

    #[error("zero of the extension not resolved: {0}")]
    Resolution(String),

    #[error("slope shooting failed: {0}")]
    Shooting(String),

    #[error("route discrepancy {discrepancy:.3e} exceeds threshold {threshold:.3e}")]
    RouteDiscrepancy { discrepancy: f64, threshold: f64 },

    #[error("grid not commensurate: {0}")]
    NonCommensurate(String),

    #[error("bracket inverted: beta = {beta} is below the minimal admissible beta = {min_beta}")]
    BracketInverted { beta: f64, min_beta: f64 },

    #[error("iterate escaped the barrier bracket on {steps} consecutive Newton steps")]
    BracketEscape { steps: usize },

    #[error("no convergence after {iterations} iterations (last change {change:.3e})")]
    NoConvergence { iterations: usize, change: f64 },

    #[error("empty sample set: {0}")]
    EmptySample(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input or configuration rather than a
    /// numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::GammaOutOfRange(_)
                | Error::InvalidArgument(_)
                | Error::NonCommensurate(_)
                | Error::Parse { .. }
                | Error::Json(_)
                | Error::Io(_)
                | Error::TangentTest { .. }
                | Error::ExpansionWindow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
