use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("layout error: {0}")]
    Layout(String),
    #[error("operator is singular where an inverse was required")]
    SingularOperator,
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("event has zero probability")]
    ZeroProbabilityEvent,
    #[error("register {0} is not classical")]
    Classicality(String),
    #[error("state has zero trace")]
    ZeroState,
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),
    #[error("smoothing correction diverges at epsilon = 0")]
    DivergentCorrection,
    #[error("optimizer stalled after {iters} iterations: best {best}, residual {residual:.3e}")]
    StalledOptimizer { best: f64, residual: f64, iters: usize },
    #[error("problem is infeasible: {0}")]
    Infeasible(String),
    #[error("problem is unbounded: {0}")]
    Unbounded(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("empty input")]
    EmptyInput,
    #[error("total dimension {0} exceeds the supported limit")]
    DimensionLimit(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
