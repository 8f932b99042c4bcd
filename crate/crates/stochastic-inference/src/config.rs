//! Sampling configuration shared by plan construction, Monte-Carlo drivers,
//! and the command-line harness.

use serde::{Deserialize, Serialize};

use crate::error::{InferenceError, Result};

/// How sampling probabilities are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact surrogate minimization via the scalar root-finder.
    VmExact,
    /// Magnitude-proportional closed form (small draw counts).
    VmLin,
    /// Logarithmic closed form (large draw counts).
    VmLog,
    /// Dynamic magnitude-proportional probabilities, recomputed per pass from
    /// the observed (already randomized) activations.
    #[serde(alias = "sap")]
    DvmLin,
    /// Dynamic logarithmic probabilities.
    DvmLog,
    /// Classic uniform dropout with a fixed keep probability.
    UniformDropout,
}

impl Method {
    /// Fixed-probability methods build a [`crate::SamplingPlan`] once per input.
    pub fn is_fixed(self) -> bool {
        matches!(
            self,
            Method::VmExact | Method::VmLin | Method::VmLog | Method::UniformDropout
        )
    }

    /// Dynamic methods recompute probabilities inside every Monte-Carlo pass.
    pub fn is_dynamic(self) -> bool {
        !self.is_fixed()
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::VmExact => "vm-exact",
            Method::VmLin => "vm-lin",
            Method::VmLog => "vm-log",
            Method::DvmLin => "dvm-lin",
            Method::DvmLog => "dvm-log",
            Method::UniformDropout => "uniform-dropout",
        };
        write!(f, "{s}")
    }
}

/// How a binary pick vector is realized from the plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskMode {
    /// `round(C)` categorical draws with replacement, OR-composed. Faithful to
    /// the sampling-with-replacement model; used for fidelity tests.
    OrComposition,
    /// One Bernoulli draw per unit with the reduced marginals
    /// `π_i = 1-(1-p_i)^C`. The fast default.
    #[default]
    IndependentBernoulli,
}

/// Full description of one detection-network configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub method: Method,
    /// Sampling unit position: index of the hidden layer whose post-activation
    /// is masked (0-based; valid positions are the non-final layers).
    pub block: usize,
    /// Sampling ratio; the draw count is `C = f * nnz(activation)`.
    #[serde(default)]
    pub f: Option<f64>,
    /// Keep probability for uniform dropout.
    #[serde(default)]
    pub dropout_keep: Option<f64>,
    /// Number of Monte-Carlo passes.
    pub r: usize,
    #[serde(default)]
    pub mask_mode: MaskMode,
    pub seed: u64,
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(InferenceError::InvalidConfig(format!(
                "need at least 2 Monte-Carlo passes, got {}",
                self.r
            )));
        }
        match self.method {
            Method::UniformDropout => {
                let keep = self.dropout_keep.ok_or_else(|| {
                    InferenceError::InvalidConfig(
                        "uniform-dropout requires dropout_keep".into(),
                    )
                })?;
                if !(keep > 0.0 && keep <= 1.0) {
                    return Err(InferenceError::InvalidConfig(format!(
                        "dropout_keep must be in (0, 1], got {keep}"
                    )));
                }
            }
            _ => {
                let f = self.f.ok_or_else(|| {
                    InferenceError::InvalidConfig(format!(
                        "method {} requires the sampling ratio f",
                        self.method
                    ))
                })?;
                if !(f > 0.0 && f.is_finite()) {
                    return Err(InferenceError::InvalidConfig(format!(
                        "sampling ratio f must be > 0, got {f}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sampling ratio, for methods that have one.
    pub fn ratio(&self) -> f64 {
        self.f.expect("validated config has f")
    }
}
