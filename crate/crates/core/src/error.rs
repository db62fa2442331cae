use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site-set size mismatch: {left} vs {right} sites")]
    SizeMismatch { left: usize, right: usize },

    #[error("chain length {0} outside the supported range {1}")]
    ChainLength(usize, &'static str),

    #[error("|epsilon|*M = {product} exceeds 1 (epsilon = {epsilon}, M = {norm_m})")]
    ParameterDomain {
        epsilon: f64,
        norm_m: f64,
        product: f64,
    },

    #[error("invalid truncation policy: {0}")]
    Policy(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last sup-norm change {last_delta:e})")]
    Divergence { iterations: usize, last_delta: f64 },

    #[error("weight undefined: epsilon = 0 with nonzero coefficients")]
    WeightUndefined,

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("frame {frame} is not defined for model {model}")]
    InvalidFrame { frame: String, model: String },

    #[error("symmetry violation: commutator max entry {0:e}")]
    SymmetryViolation(f64),

    #[error("samples do not lie on the 2N momentum grid: {0}")]
    GridMismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("ansatz vector vanishes at momentum index {0}")]
    DegenerateMomentum(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
