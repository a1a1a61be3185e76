use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,

    #[error(
        "frame is not orthonormal: |p|^2-1 = {p_norm_err:.3e}, |q|^2-1 = {q_norm_err:.3e}, p.q = {dot:.3e}"
    )]
    NonOrthonormalFrame {
        p_norm_err: f64,
        q_norm_err: f64,
        dot: f64,
    },

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("width budget violated: got {budget:.12}, limit {limit:.12}")]
    BudgetViolation { budget: f64, limit: f64 },

    #[error("item {index}: polynomial restricts to zero on the sphere")]
    ZeroOnSphere { index: usize },

    #[error("operation requires the {expected} domain")]
    WrongDomain { expected: &'static str },

    #[error("point lies on the zero set of item {index}")]
    OnVariety { index: usize },

    #[error("vectors are rank deficient: numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("value {value} out of range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("grid oracle supports at most {max} real dimensions, got {got}")]
    GridDimension { got: usize, max: usize },

    #[error("grid oracle would need {nodes} nodes, limit is {limit}")]
    GridTooLarge { nodes: u128, limit: u128 },

    #[error("all optimizer starts landed on zero sets")]
    AllStartsOnVarieties,

    #[error("root order mismatch: detected {found}, expected {expected}")]
    RootOrderMismatch { found: usize, expected: usize },

    #[error("point outside the admissible ball: |z|^2 = {norm2:.6e} > {limit:.6e}")]
    OutsideAdmissible { norm2: f64, limit: f64 },

    #[error("vector is not unit: |v| = {norm}")]
    NotUnit { norm: f64 },

    #[error("need at least {need} vectors, got {got}")]
    TooFewVectors { need: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
