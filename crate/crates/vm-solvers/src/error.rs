use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver input: {0}")]
    InvalidInput(String),

    #[error("support is empty: all coefficients are zero")]
    EmptySupport,

    #[error("tolerance must be > 0, got {0}")]
    InvalidTolerance(f64),

    #[error("bracket expansion failed: no sign change after {tried} doublings")]
    BracketFailure { tried: usize },

    #[error("projected gradient did not converge within {max_iters} iterations")]
    NonConvergence { max_iters: usize },

    #[error("probability vector violates simplex constraints: {0}")]
    NotSimplex(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
