//! Monte-Carlo forward passes through the detection network.

use nn_core::NetworkSpec;
use vm_solvers::bernoulli_params;

use crate::config::{MaskMode, Method, SamplingConfig};
use crate::error::{InferenceError, Result};
use crate::mask::{apply_sampling, draw_mask};
use crate::plan::{unit_probabilities, PlanEntry, PlanKind, SamplingPlan};
use crate::rng::pass_rng;

/// Reproducibility metadata recorded with every batch.
#[derive(Debug, Clone)]
pub struct BatchSnapshot {
    pub seed: u64,
    pub mask_mode: MaskMode,
    /// Probability method, when the batch was produced by a dynamic driver.
    pub method: Option<Method>,
}

/// Per-pass record of one dynamically sampled unit: the observed activation
/// and the probabilities computed from it.
#[derive(Debug, Clone)]
pub struct UnitDraw {
    pub pass: usize,
    pub layer_index: usize,
    pub observed: Vec<f64>,
    pub p: Vec<f64>,
}

/// The `R` softmax outputs of one input, plus diagnostics.
#[derive(Debug, Clone)]
pub struct McBatch {
    pub outputs: Vec<Vec<f64>>,
    pub snapshot: BatchSnapshot,
    /// Unit visits skipped because the observed activation was all zero
    /// (dynamic methods only).
    pub skipped_units: usize,
    /// Dynamic-probability log, empty for fixed plans.
    pub unit_log: Vec<UnitDraw>,
}

impl McBatch {
    pub fn r(&self) -> usize {
        self.outputs.len()
    }

    /// CSV emission: `R` rows of `K` comma-separated values, shortest f64
    /// representation (lossless re-ingestion).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for y in &self.outputs {
            let row: Vec<String> = y.iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn check_finite(v: &[f64], layer: usize, pass: usize) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(InferenceError::Numeric { layer, pass });
    }
    Ok(())
}

/// One stochastic pass with a per-layer masking hook.
fn stochastic_pass<F>(net: &NetworkSpec, x: &[f64], pass: usize, mut hook: F) -> Result<Vec<f64>>
where
    F: FnMut(usize, Vec<f64>) -> Result<Vec<f64>>,
{
    let mut cur = x.to_vec();
    let last = net.num_layers() - 1;
    for (l, layer) in net.layers().iter().enumerate() {
        if cur.len() != layer.in_dim() {
            return Err(InferenceError::Network(nn_core::NnError::ShapeMismatch {
                expected: layer.in_dim(),
                actual: cur.len(),
            }));
        }
        let pre = layer.affine(&cur);
        cur = layer.activation.apply(&pre);
        check_finite(&cur, l, pass)?;
        if l < last {
            cur = hook(l, cur)?;
            check_finite(&cur, l, pass)?;
        }
    }
    Ok(cur)
}

/// Runs `r` Monte-Carlo passes with the fixed sampling plan: at every planned
/// unit position the activation is masked and rescaled before the next layer.
/// Passes draw from independent counter-derived streams of `seed`.
pub fn mc_forward_fixed(
    net: &NetworkSpec,
    x: &[f64],
    plan: &SamplingPlan,
    r: usize,
    mask_mode: MaskMode,
    seed: u64,
) -> Result<McBatch> {
    net.require_classifier()?;
    let mut outputs = Vec::with_capacity(r);
    for pass in 0..r {
        let mut rng = pass_rng(seed, pass);
        let y = stochastic_pass(net, x, pass, |layer, activation| {
            let Some(entry) = plan.entry_at(layer) else {
                return Ok(activation);
            };
            if entry.width() != activation.len() {
                return Err(InferenceError::PlanMismatch {
                    layer,
                    entry_len: entry.width(),
                    layer_len: activation.len(),
                });
            }
            let mask = draw_mask(entry, mask_mode, &mut rng)?;
            Ok(apply_sampling(&activation, &mask))
        })?;
        outputs.push(y);
    }
    Ok(McBatch {
        outputs,
        snapshot: BatchSnapshot {
            seed,
            mask_mode,
            method: None,
        },
        skipped_units: 0,
        unit_log: Vec::new(),
    })
}

/// Runs `cfg.r` Monte-Carlo passes with dynamic probabilities: at the active
/// unit, the observed (already randomized upstream) activation determines the
/// sampling probabilities for that pass. Units observing an all-zero
/// activation are passed through unmasked and counted.
pub fn mc_forward_dynamic(net: &NetworkSpec, x: &[f64], cfg: &SamplingConfig) -> Result<McBatch> {
    net.require_classifier()?;
    cfg.validate()?;
    if !cfg.method.is_dynamic() {
        return Err(InferenceError::InvalidConfig(format!(
            "method {} is not dynamic",
            cfg.method
        )));
    }
    if cfg.block >= net.num_layers() - 1 {
        return Err(InferenceError::BlockOutOfRange {
            block: cfg.block,
            limit: net.num_layers() - 1,
        });
    }

    let mut outputs = Vec::with_capacity(cfg.r);
    let mut skipped_units = 0usize;
    let mut unit_log = Vec::new();
    for pass in 0..cfg.r {
        let mut rng = pass_rng(cfg.seed, pass);
        let y = stochastic_pass(net, x, pass, |layer, activation| {
            if layer != cfg.block {
                return Ok(activation);
            }
            let (p, c) = match unit_probabilities(cfg.method, &activation, cfg.ratio(), layer) {
                Ok(pc) => pc,
                Err(InferenceError::DegenerateUnit { .. }) => {
                    skipped_units += 1;
                    return Ok(activation);
                }
                Err(e) => return Err(e),
            };
            let pi = bernoulli_params(&p, c);
            unit_log.push(UnitDraw {
                pass,
                layer_index: layer,
                observed: activation.clone(),
                p: p.as_slice().to_vec(),
            });
            let entry = PlanEntry {
                layer_index: layer,
                kind: PlanKind::VarianceMin { p, c },
                pi,
            };
            let mask = draw_mask(&entry, cfg.mask_mode, &mut rng)?;
            Ok(apply_sampling(&activation, &mask))
        })?;
        outputs.push(y);
    }
    Ok(McBatch {
        outputs,
        snapshot: BatchSnapshot {
            seed: cfg.seed,
            mask_mode: cfg.mask_mode,
            method: Some(cfg.method),
        },
        skipped_units,
        unit_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::build_plan;
    use nn_core::{Activation, DenseLayer, Matrix, NetworkSpec};

    fn toy_net() -> NetworkSpec {
        NetworkSpec::new(vec![
            DenseLayer::new(
                Matrix::from_rows(&[vec![0.8, -0.3], vec![0.2, 0.9], vec![-0.5, 0.4]]),
                vec![0.1, -0.1, 0.0],
                Activation::Tanh,
            )
            .unwrap(),
            DenseLayer::new(
                Matrix::from_rows(&[vec![1.0, -0.2, 0.5], vec![-0.6, 0.8, 0.3]]),
                vec![0.0, 0.05],
                Activation::Softmax,
            )
            .unwrap(),
        ])
        .unwrap()
    }

    fn cfg(method: Method, seed: u64) -> SamplingConfig {
        SamplingConfig {
            method,
            block: 0,
            f: Some(1.5),
            dropout_keep: None,
            r: 4,
            mask_mode: MaskMode::IndependentBernoulli,
            seed,
        }
    }

    #[test]
    fn certain_plan_reproduces_full_network() {
        let net = toy_net();
        let x = [0.4, -0.7];
        let trace = net.forward_full(&x).unwrap();
        let mut plan = build_plan(&trace, &cfg(Method::VmLin, 0)).unwrap();
        // Force pi == 1: the detection net degenerates to the full net.
        plan.entries[0].pi = vec![1.0; 3];
        let batch =
            mc_forward_fixed(&net, &x, &plan, 5, MaskMode::IndependentBernoulli, 1).unwrap();
        for y in &batch.outputs {
            assert_eq!(y.as_slice(), trace.output());
        }
    }

    #[test]
    fn fixed_seed_reproduces_batches() {
        let net = toy_net();
        let x = [0.3, 0.2];
        let trace = net.forward_full(&x).unwrap();
        let plan = build_plan(&trace, &cfg(Method::VmExact, 0)).unwrap();
        let a = mc_forward_fixed(&net, &x, &plan, 2, MaskMode::IndependentBernoulli, 7).unwrap();
        let b = mc_forward_fixed(&net, &x, &plan, 2, MaskMode::IndependentBernoulli, 7).unwrap();
        assert_eq!(a.outputs, b.outputs);
        let c = mc_forward_fixed(&net, &x, &plan, 2, MaskMode::IndependentBernoulli, 8).unwrap();
        assert_ne!(a.outputs, c.outputs);
    }

    #[test]
    fn outputs_are_probability_vectors() {
        let net = toy_net();
        let x = [0.9, -0.1];
        let trace = net.forward_full(&x).unwrap();
        let plan = build_plan(&trace, &cfg(Method::VmLog, 3)).unwrap();
        let batch =
            mc_forward_fixed(&net, &x, &plan, 16, MaskMode::OrComposition, 3).unwrap();
        assert_eq!(batch.r(), 16);
        for y in &batch.outputs {
            let s: f64 = y.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn dynamic_first_position_equals_fixed_sap_plan() {
        // With the unit at the first position there is no upstream randomness,
        // so per-pass dynamic probabilities equal the fixed-plan ones and the
        // outputs coincide draw for draw under a shared seed.
        let net = toy_net();
        let x = [0.25, 0.65];
        let dyn_cfg = cfg(Method::DvmLin, 11);
        let batch_dyn = mc_forward_dynamic(&net, &x, &dyn_cfg).unwrap();

        let trace = net.forward_full(&x).unwrap();
        let fixed = build_plan(&trace, &cfg(Method::VmLin, 11)).unwrap();
        let batch_fixed =
            mc_forward_fixed(&net, &x, &fixed, 4, MaskMode::IndependentBernoulli, 11).unwrap();
        assert_eq!(batch_dyn.outputs, batch_fixed.outputs);
    }

    #[test]
    fn dynamic_probabilities_match_magnitude_rule_per_pass() {
        let net = toy_net();
        let x = [0.8, -0.2];
        let batch = mc_forward_dynamic(&net, &x, &cfg(Method::DvmLin, 23)).unwrap();
        assert_eq!(batch.unit_log.len(), 4);
        for draw in &batch.unit_log {
            let denom: f64 = draw.observed.iter().map(|v| v.abs()).sum();
            for (pi, xi) in draw.p.iter().zip(&draw.observed) {
                assert!((pi - xi.abs() / denom).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dynamic_requires_dynamic_method() {
        let net = toy_net();
        assert!(mc_forward_dynamic(&net, &[0.1, 0.1], &cfg(Method::VmLin, 0)).is_err());
    }

    #[test]
    fn csv_round_trip_shape() {
        let net = toy_net();
        let x = [0.5, 0.5];
        let trace = net.forward_full(&x).unwrap();
        let plan = build_plan(&trace, &cfg(Method::VmLin, 0)).unwrap();
        let batch =
            mc_forward_fixed(&net, &x, &plan, 3, MaskMode::IndependentBernoulli, 0).unwrap();
        let csv = batch.to_csv();
        let rows: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(rows.len(), 3);
        for (row, y) in rows.iter().zip(&batch.outputs) {
            let parsed: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(&parsed, y);
        }
    }
}
