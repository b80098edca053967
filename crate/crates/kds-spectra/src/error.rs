//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, KdsError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KdsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate horizons: {0}")]
    DegenerateHorizons(String),
    #[error("point outside chart domain: {0}")]
    ChartDomain(String),
    #[error("spherical chart evaluated too close to a pole (theta = {0})")]
    PoleSingular(f64),
    #[error("finite-difference step too large: Richardson disagreement {disagreement:e} exceeds {tolerance:e}")]
    StepTooLarge { disagreement: f64, tolerance: f64 },
    #[error("induced form not spacelike at node {0}")]
    NotSpacelike(usize),
    #[error("trajectory left the chart domain at s = {s} after {steps} steps")]
    LeftDomain { s: f64, steps: usize },
    #[error("integrator tolerance failure: {0}")]
    ToleranceFailure(String),
    #[error("fit failure: residual {residual:e} exceeds {tolerance:e}")]
    FitFailure { residual: f64, tolerance: f64 },
    #[error("unknown operator: {0}")]
    UnknownOperator(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("mismatch in block {block}: {detail}")]
    MismatchAt { block: String, detail: String },
    #[error("curvature evaluation failed: {0}")]
    CurvatureFailure(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("smallness violated: {0}")]
    SmallnessViolated(String),
    #[error("assembled metric not Lorentzian at node {0}")]
    NotLorentzian(usize),
    #[error("degenerate normal at node {0}")]
    DegenerateNormal(usize),
    #[error("iteration diverged at step {iteration} (residual {residual:e})")]
    Diverged { iteration: usize, residual: f64, trace: Vec<f64> },
}

impl KdsError {
    /// Stable kebab-case tag used in serialized error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            KdsError::InvalidParams(_) => "invalid-params",
            KdsError::DegenerateHorizons(_) => "degenerate-horizons",
            KdsError::ChartDomain(_) => "chart-domain",
            KdsError::PoleSingular(_) => "pole-singular",
            KdsError::StepTooLarge { .. } => "step-too-large",
            KdsError::NotSpacelike(_) => "not-spacelike",
            KdsError::LeftDomain { .. } => "left-domain",
            KdsError::ToleranceFailure(_) => "tolerance-failure",
            KdsError::FitFailure { .. } => "fit-failure",
            KdsError::UnknownOperator(_) => "unknown-operator",
            KdsError::VerificationFailed(_) => "verification-failed",
            KdsError::MismatchAt { .. } => "mismatch",
            KdsError::CurvatureFailure(_) => "curvature-failure",
            KdsError::NoConvergence { .. } => "no-convergence",
            KdsError::SmallnessViolated(_) => "smallness-violated",
            KdsError::NotLorentzian(_) => "not-lorentzian",
            KdsError::DegenerateNormal(_) => "degenerate-normal",
            KdsError::Diverged { .. } => "diverged",
        }
    }
}
