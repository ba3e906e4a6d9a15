use thiserror::Error;

/// Errors raised by set construction, quadrature, solvers and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid finite-gap set: {0}")]
    InvalidSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {panels} panels")]
    QuadratureNonConvergence { value: f64, error: f64, panels: usize },

    #[error("logarithmic potential diverges: evaluation point {0} carries an atom")]
    AtomSingularity(f64),

    #[error("equilibrium solve did not converge: residual {residual:e} after {iterations} iterations")]
    EquilibriumNonConvergence { residual: f64, iterations: usize },

    #[error("Frostman cross-validation failed: capacities {values:?} disagree by {spread:e}")]
    FrostmanMismatch { values: Vec<f64>, spread: f64 },

    #[error("measure support too small: need {needed} points, have {available}")]
    SupportTooSmall { needed: usize, available: usize },

    #[error("loss of orthogonality in recurrence; last trusted index {last_trusted}")]
    OrthogonalityLoss { last_trusted: usize },

    #[error("optimizer stalled after {iterations} iterations: best norm {best_norm:e}, stationarity residual {residual:e}")]
    OptimizerStall { best_norm: f64, iterations: usize, residual: f64 },

    #[error("minimax exchange failed: {0}")]
    ExchangeFailure(String),

    #[error("eigenvalue iteration failed to converge")]
    EigenNonConvergence,

    #[error("bound not applicable: {0}")]
    IneligibleBound(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
