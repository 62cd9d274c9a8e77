use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("profiles live on different grids")]
    GridMismatch,

    #[error("profile has {got} samples, grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at node {node}")]
    NonFinite { node: usize },

    #[error("metric loses Riemannian signature at node {node} (A = {a}, B = {b})")]
    Signature { node: usize, a: f64, b: f64 },

    #[error("lapse is not positive at node {node} (V = {value})")]
    Lapse { node: usize, value: f64 },

    #[error("dimension n = {0} is not supported (need n >= 3)")]
    Dimension(usize),

    #[error("metrics have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("time step {dt:e} exceeds the explicit stability limit {limit:e}")]
    Unstable { dt: f64, limit: f64 },

    #[error("degenerate linear system at order {order} (determinant {det:e})")]
    Degenerate { order: usize, det: f64 },

    #[error("series error: {0}")]
    Series(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
