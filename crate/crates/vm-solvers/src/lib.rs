//! Sampling-probability solvers over the probability simplex.
//!
//! Given squared hidden-unit activations `α` and a draw count `C`, these
//! solvers choose categorical sampling probabilities `p` that minimize the
//! layer-wise variance cost `Σ α_i / (1 - (1-p_i)^C)`:
//!
//! - [`solve_exact`] minimizes the tight exponential surrogate
//!   `Σ α_i / (1 - e^{-C p_i})` exactly, by reducing the KKT system to a
//!   scalar root-finding problem solved with bisection (plus Newton polish).
//! - [`solve_linear`] is the small-`C` closed form: probabilities
//!   proportional to activation magnitudes.
//! - [`solve_log`] is the large-`C` closed form with a clipped logarithmic
//!   profile and a one-shot fixed-point normalization.
//! - [`oracle_projected_gradient`] independently minimizes either objective
//!   by projected gradient descent; it exists as a cross-checking oracle.
//!
//! [`bernoulli_params`] maps categorical probabilities to the marginal pick
//! probabilities `π_i = 1 - (1-p_i)^C` of the induced Bernoulli reduction.
//!
//! Everything here is a pure function of its inputs and safe to call
//! concurrently.

pub mod closed_form;
pub mod error;
pub mod exact;
pub mod input;
pub mod objective;
pub mod oracle;

pub use closed_form::{solve_linear, solve_log};
pub use error::{Result, SolverError};
pub use exact::{kkt_residual, root_equation, solve_exact, SolverState};
pub use input::{ProbabilityVector, SolverInput};
pub use objective::{bernoulli_params, exact_objective, surrogate_objective};
pub use oracle::{oracle_projected_gradient, project_to_simplex, ObjectiveKind};
