use nalgebra::Vector3;
use thiserror::Error;

/// Errors produced by the gauge-lab numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeLabError {
    #[error("point {point:?} lies outside the domain of `{field}`")]
    OutsideDomain { field: String, point: [f64; 3] },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid too coarse: axis {axis} has {points} points (minimum {minimum})")]
    GridTooCoarse {
        axis: usize,
        points: usize,
        minimum: usize,
    },

    #[error("grid or time mismatch: {0}")]
    GridMismatch(String),

    #[error("quadrature did not converge at r = {point:?}: last estimate {estimate:e}, change {change:e}")]
    QuadratureNotConverged {
        point: [f64; 3],
        estimate: f64,
        change: f64,
    },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    EigenNotConverged {
        iterations: usize,
        worst_residual: f64,
    },

    #[error("linear solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    LinearSolveFailed { iterations: usize, residual: f64 },

    #[error("norm drift {drift:e} at t = {time} exceeds {limit:e}")]
    NormDrift { drift: f64, time: f64, limit: f64 },

    #[error("index {index} out of range for {count} states")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("gauge function `{0}` has no separable form f(r) + g(t)")]
    NotSeparable(String),
}

pub type Result<T> = std::result::Result<T, GaugeLabError>;

pub(crate) fn point_array(r: &Vector3<f64>) -> [f64; 3] {
    [r.x, r.y, r.z]
}
