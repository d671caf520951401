use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("{scheme} stencil needs {needed} points on axis `{axis}`, grid has {got}")]
    StencilTooWide {
        scheme: &'static str,
        axis: String,
        needed: usize,
        got: usize,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("singular matrix at node {node}")]
    Singular { node: usize },

    #[error("spectral weight has a pole at lambda = {0}")]
    Pole(C64),

    #[error("seed frame is not orthonormal (Gram deviation {0:e})")]
    NonOrthonormalSeed(f64),

    #[error("CFL bound exceeded: |a| d/h = {ratio} > {limit}")]
    Cfl { ratio: f64, limit: f64 },

    #[error("time step {dt:e} exceeds stability bound {bound:e}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("constraint violated: max relative deviation {0:e}")]
    Constraint(f64),

    #[error("missing input: {0}")]
    Missing(String),

    #[error("parameters must coincide (a = {a}, b = {b})")]
    ParameterMismatch { a: C64, b: C64 },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
