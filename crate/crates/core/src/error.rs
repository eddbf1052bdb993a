use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate metric at {u:?}: det g = {det:e}")]
    DegenerateMetric { u: Vec<f64>, det: f64 },
    #[error("point {u:?} lies outside the chart box")]
    OutOfDomain { u: Vec<f64> },
    #[error("vector is not normal: tangential part has norm {tangential:e}")]
    NotNormal { tangential: f64 },
    #[error("plane offset has tangential component {tangential:e}")]
    BadOffset { tangential: f64 },
    #[error("unsupported example: {0}")]
    UnsupportedSpec(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("variation step {step} too large: immersion degenerates")]
    StepTooLarge { step: f64 },
    #[error("not a xi-submanifold: residual {residual:e} exceeds {tolerance:e}")]
    NotXiSubmanifold { residual: f64, tolerance: f64 },
    #[error("no parallel normal frame available for {0}")]
    NoParallelFrame(String),
    #[error("ill-conditioned basis: Gram condition number {condition:e}")]
    IllConditionedBasis { condition: f64 },
    #[error("Hermite degree {degree} exceeds the limit {limit}")]
    DegreeTooLarge { degree: usize, limit: usize },
    #[error("trajectory left the ball of radius {bound} at s = {s}")]
    BlowUp { s: f64, bound: f64 },
    #[error("no near-return found before s_max = {s_max}")]
    Inconclusive { s_max: f64 },
    #[error("Frenet frame degenerate: curvature vanishes at t = {t}")]
    FrenetDegenerate { t: f64 },
    #[error("ODE integration failed: {0}")]
    Integration(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
