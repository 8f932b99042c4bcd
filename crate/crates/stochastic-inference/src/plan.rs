//! Sampling plans: per-unit probabilities computed once from a deterministic
//! trace (the fixed-probability methods).

use nn_core::ActivationTrace;
use vm_solvers::{bernoulli_params, solve_exact, solve_linear, solve_log, ProbabilityVector, SolverInput};

use crate::config::{Method, SamplingConfig};
use crate::error::{InferenceError, Result};

/// How the entry's mask distribution is parameterized.
#[derive(Debug, Clone)]
pub enum PlanKind {
    /// Solver-derived categorical probabilities with a draw count.
    VarianceMin { p: ProbabilityVector, c: f64 },
    /// Uniform dropout: independent keeps with one shared probability. There
    /// is no categorical vector, so masks are always drawn independently.
    Uniform { keep: f64 },
}

/// One active sampling unit.
#[derive(Debug, Clone)]
pub struct PlanEntry {
    /// Hidden-layer index whose post-activation is masked.
    pub layer_index: usize,
    pub kind: PlanKind,
    /// Marginal pick probabilities; `1-(1-p_i)^C` for solver entries, the
    /// keep probability everywhere for uniform dropout.
    pub pi: Vec<f64>,
}

impl PlanEntry {
    pub fn width(&self) -> usize {
        self.pi.len()
    }
}

/// All active units of one detection-network configuration, plus positions
/// that had to be skipped because every activation there was zero.
#[derive(Debug, Clone)]
pub struct SamplingPlan {
    pub entries: Vec<PlanEntry>,
    pub skipped_units: Vec<usize>,
}

impl SamplingPlan {
    pub fn entry_at(&self, layer: usize) -> Option<&PlanEntry> {
        self.entries.iter().find(|e| e.layer_index == layer)
    }
}

/// Number of nonzero entries.
pub fn nnz(x: &[f64]) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

/// Sampling probabilities for one observed activation vector under a
/// fixed-probability method. `C = f * nnz(x)`.
pub fn unit_probabilities(
    method: Method,
    x: &[f64],
    f: f64,
    layer: usize,
) -> Result<(ProbabilityVector, f64)> {
    let nonzero = nnz(x);
    if nonzero == 0 {
        return Err(InferenceError::DegenerateUnit { layer });
    }
    let c = f * nonzero as f64;
    let input = SolverInput::from_activations(x, c)?;
    let p = match method {
        Method::VmExact => solve_exact(&input, 1e-9)?.0,
        Method::VmLin | Method::DvmLin => solve_linear(&input)?,
        Method::VmLog | Method::DvmLog => solve_log(&input)?,
        Method::UniformDropout => {
            return Err(InferenceError::InvalidConfig(
                "uniform dropout has no categorical probabilities".into(),
            ))
        }
    };
    Ok((p, c))
}

/// Builds the sampling plan for one input from its deterministic trace.
///
/// The active unit is the post-activation of layer `cfg.block`. A unit whose
/// activation vector is entirely zero is reported in `skipped_units` and left
/// out of the plan rather than failing the whole input.
pub fn build_plan(trace: &ActivationTrace, cfg: &SamplingConfig) -> Result<SamplingPlan> {
    cfg.validate()?;
    if !cfg.method.is_fixed() {
        return Err(InferenceError::InvalidConfig(format!(
            "method {} determines probabilities per pass and has no fixed plan",
            cfg.method
        )));
    }
    // Valid positions exclude the final (softmax) layer.
    let limit = trace.len().saturating_sub(1);
    if cfg.block >= limit {
        return Err(InferenceError::BlockOutOfRange {
            block: cfg.block,
            limit,
        });
    }

    let x = &trace.post[cfg.block];
    let mut entries = Vec::new();
    let mut skipped_units = Vec::new();

    match cfg.method {
        Method::UniformDropout => {
            let keep = cfg.dropout_keep.expect("validated");
            entries.push(PlanEntry {
                layer_index: cfg.block,
                kind: PlanKind::Uniform { keep },
                pi: vec![keep; x.len()],
            });
        }
        method => match unit_probabilities(method, x, cfg.ratio(), cfg.block) {
            Ok((p, c)) => {
                let pi = bernoulli_params(&p, c);
                entries.push(PlanEntry {
                    layer_index: cfg.block,
                    kind: PlanKind::VarianceMin { p, c },
                    pi,
                });
            }
            Err(InferenceError::DegenerateUnit { layer }) => skipped_units.push(layer),
            Err(e) => return Err(e),
        },
    }

    Ok(SamplingPlan {
        entries,
        skipped_units,
    })
}
