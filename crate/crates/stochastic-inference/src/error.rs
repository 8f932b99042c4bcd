use thiserror::Error;

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("invalid sampling config: {0}")]
    InvalidConfig(String),

    #[error("sampling unit position {block} out of range (valid 0..{limit})")]
    BlockOutOfRange { block: usize, limit: usize },

    #[error("plan entry at layer {layer} has {entry_len} entries, layer has {layer_len}")]
    PlanMismatch {
        layer: usize,
        entry_len: usize,
        layer_len: usize,
    },

    #[error("all activations are zero at sampling unit {layer}")]
    DegenerateUnit { layer: usize },

    #[error("or-composition needs a rounded draw count >= 1, got {0}")]
    InvalidDrawCount(f64),

    #[error("non-finite value produced at layer {layer} in pass {pass}")]
    Numeric { layer: usize, pass: usize },

    #[error(transparent)]
    Network(#[from] nn_core::NnError),

    #[error(transparent)]
    Solver(#[from] vm_solvers::SolverError),
}

pub type Result<T> = std::result::Result<T, InferenceError>;
