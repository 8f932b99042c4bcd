//! Minimal dense feedforward networks with activation capture.
//!
//! Provides the deterministic "full network": construction and validation,
//! a forward pass that records every per-layer pre/post-activation vector,
//! cross-entropy backpropagation (input gradients for attack crafting,
//! parameter gradients for SGD training), and versioned JSON model files.
//!
//! Networks are immutable after construction and all passes are pure
//! functions, so values can be shared freely across threads.

pub mod activation;
pub mod error;
pub mod gradient;
pub mod linalg;
pub mod network;
pub mod serialize;
pub mod train;

pub use activation::{softmax, Activation};
pub use error::{NnError, Result};
pub use gradient::{cross_entropy, grad_input};
pub use linalg::Matrix;
pub use network::{argmax, ActivationTrace, DenseLayer, NetworkSpec};
pub use train::{accuracy, init_network, train_sgd, TrainConfig};
