//! Randomized inference for adversarial-input detection.
//!
//! Inserts sampling units at hidden-layer outputs of a trained network: per
//! Monte-Carlo pass, units are kept or zeroed according to a sampling plan
//! and the survivors are rescaled by the inverse pick probability, keeping
//! the masked activation mean-preserving. Plans come from the variance
//! minimizing solvers (fixed per input, or recomputed dynamically per pass)
//! or from classic uniform dropout.
//!
//! Passes are independent given the per-pass counter-derived RNG streams;
//! the network and plan are immutable shared inputs.

pub mod config;
pub mod error;
pub mod mask;
pub mod mc;
pub mod plan;
pub mod rng;

pub use config::{MaskMode, Method, SamplingConfig};
pub use error::{InferenceError, Result};
pub use mask::{apply_sampling, draw_mask, SamplingMask};
pub use mc::{mc_forward_dynamic, mc_forward_fixed, BatchSnapshot, McBatch, UnitDraw};
pub use plan::{build_plan, nnz, unit_probabilities, PlanEntry, PlanKind, SamplingPlan};
pub use rng::{mix_seed, pass_rng};
