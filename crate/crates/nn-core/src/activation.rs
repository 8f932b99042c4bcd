//! Layer nonlinearities.

use serde::{Deserialize, Serialize};

/// Elementwise activation kinds, plus the softmax output nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Softmax,
    Identity,
}

impl Activation {
    /// Applies the activation to a pre-activation vector.
    pub fn apply(&self, pre: &[f64]) -> Vec<f64> {
        match self {
            Activation::Relu => pre.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect(),
            Activation::Tanh => pre.iter().map(|v| v.tanh()).collect(),
            Activation::Identity => pre.to_vec(),
            Activation::Softmax => softmax(pre),
        }
    }

    /// Derivative of the elementwise activation, evaluated from the stored
    /// pre/post pair. ReLU uses subgradient 0 at the kink. Not defined for
    /// softmax, which is only legal as the final layer and is differentiated
    /// jointly with the cross-entropy loss.
    pub fn derivative(&self, pre: f64, post: f64) -> f64 {
        match self {
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - post * post,
            Activation::Identity => 1.0,
            Activation::Softmax => panic!("softmax has no elementwise derivative"),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Softmax => "softmax",
            Activation::Identity => "identity",
        };
        write!(f, "{s}")
    }
}

/// Numerically safe softmax: subtracts the max logit before exponentiation,
/// so `softmax(u + c·1) == softmax(u)` and large logits cannot overflow.
pub fn softmax(u: &[f64]) -> Vec<f64> {
    assert!(!u.is_empty(), "softmax of empty vector");
    let max = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = u.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}
