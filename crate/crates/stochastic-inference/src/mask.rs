//! Mask realization and the scaled sampling operator.

use rand::Rng;

use crate::config::MaskMode;
use crate::error::{InferenceError, Result};
use crate::plan::{PlanEntry, PlanKind};

/// One realization of the binary pick vector together with its scaling.
///
/// `scale[i]` is `1/π_i` where the unit is picked (and `π_i > 0`), zero
/// everywhere else, so applying the mask is mean-preserving on picked units.
#[derive(Debug, Clone)]
pub struct SamplingMask {
    pub z: Vec<bool>,
    pub scale: Vec<f64>,
}

impl SamplingMask {
    fn from_picks(z: Vec<bool>, pi: &[f64]) -> Self {
        let scale = z
            .iter()
            .zip(pi)
            .map(|(&zi, &p)| if zi && p > 0.0 { 1.0 / p } else { 0.0 })
            .collect();
        Self { z, scale }
    }
}

/// Draws one mask for a plan entry.
///
/// `or-composition` performs `round(C)` categorical draws with replacement
/// from `p` and ORs the pick indicators; `independent-bernoulli` draws each
/// unit from its reduced marginal `π_i`. Uniform-dropout entries carry no
/// categorical vector and always use independent draws.
pub fn draw_mask<R: Rng>(entry: &PlanEntry, mode: MaskMode, rng: &mut R) -> Result<SamplingMask> {
    match (&entry.kind, mode) {
        (PlanKind::VarianceMin { p, c }, MaskMode::OrComposition) => {
            let draws = c.round();
            if draws < 1.0 {
                return Err(InferenceError::InvalidDrawCount(*c));
            }
            // Cumulative distribution for the categorical draws.
            let mut cdf = Vec::with_capacity(p.len());
            let mut acc = 0.0;
            for &v in p.iter() {
                acc += v;
                cdf.push(acc);
            }
            let total = acc;
            let mut z = vec![false; p.len()];
            for _ in 0..draws as u64 {
                let u: f64 = rng.random::<f64>() * total;
                let idx = cdf.partition_point(|&c| c <= u).min(p.len() - 1);
                z[idx] = true;
            }
            Ok(SamplingMask::from_picks(z, &entry.pi))
        }
        _ => {
            let z = entry
                .pi
                .iter()
                .map(|&pi| rng.random::<f64>() < pi)
                .collect();
            Ok(SamplingMask::from_picks(z, &entry.pi))
        }
    }
}

/// Applies the scaled sampling operator elementwise:
/// `out_i = z_i * scale_i * x_i`. Panics on length mismatch.
pub fn apply_sampling(x: &[f64], mask: &SamplingMask) -> Vec<f64> {
    assert_eq!(x.len(), mask.z.len(), "mask length mismatch");
    x.iter()
        .zip(mask.z.iter().zip(&mask.scale))
        .map(|(&xi, (&zi, &si))| if zi { si * xi } else { 0.0 })
        .collect()
}
