//! Uncertainty scores over a batch of Monte-Carlo softmax outputs, and the
//! threshold test that turns a score into a clean/adversarial verdict.
//!
//! All entropies use the natural logarithm with the `0·ln 0 := 0` convention;
//! the choice of base only rescales scores and the threshold is swept anyway.
//! Every function here is pure and thread-safe.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("probability vector has a negative entry: {0}")]
    NegativeEntry(f64),

    #[error("probability vector sums to {0}, expected 1")]
    NotNormalized(f64),

    #[error("need at least {needed} Monte-Carlo outputs, got {got}")]
    TooFewOutputs { needed: usize, got: usize },

    #[error("outputs have inconsistent lengths")]
    RaggedOutputs,

    #[error("score is not finite: {0}")]
    NonFiniteScore(f64),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Shannon entropy `-Σ y_k ln y_k` of a probability vector, in nats.
/// Range `[0, ln K]`; rejects negative entries and non-normalized inputs.
pub fn entropy(y: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    let mut h = 0.0;
    for &v in y {
        if v < 0.0 {
            return Err(MetricsError::NegativeEntry(v));
        }
        sum += v;
        if v > 0.0 {
            h -= v * v.ln();
        }
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(MetricsError::NotNormalized(sum));
    }
    Ok(h)
}

fn check_batch(outputs: &[Vec<f64>]) -> Result<usize> {
    if outputs.len() < 2 {
        return Err(MetricsError::TooFewOutputs {
            needed: 2,
            got: outputs.len(),
        });
    }
    let k = outputs[0].len();
    if outputs.iter().any(|y| y.len() != k) {
        return Err(MetricsError::RaggedOutputs);
    }
    Ok(k)
}

/// Mean output `ȳ = (1/R) Σ_r y^(r)`.
pub fn mean_output(outputs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = check_batch(outputs)?;
    let r = outputs.len() as f64;
    let mut mean = vec![0.0; k];
    for y in outputs {
        for (m, v) in mean.iter_mut().zip(y) {
            *m += v / r;
        }
    }
    Ok(mean)
}

/// `true` when every pass produced bit-identical output; both scores are
/// exactly zero then, short-circuiting the rounding of the sample mean.
fn all_identical(outputs: &[Vec<f64>]) -> bool {
    outputs.windows(2).all(|w| w[0] == w[1])
}

/// Mutual-information score `H(ȳ) - (1/R) Σ_r H(y^(r))`.
///
/// Nonnegative up to rounding by concavity of the entropy; exactly zero when
/// every pass produced the same output.
pub fn mutual_information(outputs: &[Vec<f64>]) -> Result<f64> {
    let mean = mean_output(outputs)?;
    if all_identical(outputs) {
        entropy(&outputs[0])?;
        return Ok(0.0);
    }
    let r = outputs.len() as f64;
    let mut avg_h = 0.0;
    for y in outputs {
        avg_h += entropy(y)? / r;
    }
    Ok(entropy(&mean)? - avg_h)
}

/// Predictive-variance trace `Tr((1/R) Σ y y^T - ȳ ȳ^T)`, computed as
/// `(1/R) Σ ||y||^2 - ||ȳ||^2`; equals the sum of per-class biased sample
/// variances.
pub fn variance_trace(outputs: &[Vec<f64>]) -> Result<f64> {
    let mean = mean_output(outputs)?;
    if all_identical(outputs) {
        return Ok(0.0);
    }
    let r = outputs.len() as f64;
    let mut mean_sq = 0.0;
    for y in outputs {
        mean_sq += y.iter().map(|v| v * v).sum::<f64>() / r;
    }
    let norm_mean: f64 = mean.iter().map(|v| v * v).sum();
    Ok(mean_sq - norm_mean)
}

/// All scores of one Monte-Carlo batch.
#[derive(Debug, Clone)]
pub struct UncertaintyScore {
    /// Mutual-information score (the default detection statistic).
    pub mi: f64,
    /// Predictive-variance trace (alternative statistic).
    pub var_trace: f64,
    /// Mean softmax output across the passes.
    pub mean_output: Vec<f64>,
}

/// Computes every uncertainty score of a batch in one pass.
pub fn score_outputs(outputs: &[Vec<f64>]) -> Result<UncertaintyScore> {
    Ok(UncertaintyScore {
        mi: mutual_information(outputs)?,
        var_trace: variance_trace(outputs)?,
        mean_output: mean_output(outputs)?,
    })
}

/// Detection threshold `τ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorThreshold {
    pub tau0: f64,
}

impl DetectorThreshold {
    pub fn new(tau0: f64) -> Result<Self> {
        if !tau0.is_finite() {
            return Err(MetricsError::NonFiniteScore(tau0));
        }
        Ok(Self { tau0 })
    }
}

/// Verdict of the hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Clean,
    Adversarial,
}

/// Declares an input adversarial iff the score strictly exceeds `τ₀`.
pub fn decide(score: f64, tau: DetectorThreshold) -> Result<Verdict> {
    if score.is_nan() {
        return Err(MetricsError::NonFiniteScore(score));
    }
    Ok(if score > tau.tau0 {
        Verdict::Adversarial
    } else {
        Verdict::Clean
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_degenerate_is_zero() {
        assert_eq!(entropy(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn entropy_uniform_is_ln_k() {
        let h = entropy(&[0.5, 0.5]).unwrap();
        assert!((h - 2.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_direct_value() {
        let h = entropy(&[0.25, 0.75]).unwrap();
        assert!((h - 0.5623351446188083).abs() < 1e-4);
    }

    #[test]
    fn entropy_rejects_negative_entries() {
        assert!(matches!(
            entropy(&[1.1, -0.1]),
            Err(MetricsError::NegativeEntry(_))
        ));
    }

    #[test]
    fn mi_zero_when_outputs_identical() {
        let outputs = vec![vec![0.3, 0.7]; 5];
        let mi = mutual_information(&outputs).unwrap();
        assert!(mi.abs() < 1e-15);
    }

    #[test]
    fn mi_of_maximally_split_pair_is_ln2() {
        let outputs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let mi = mutual_information(&outputs).unwrap();
        assert!((mi - 2.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn variance_trace_zero_spread() {
        let outputs = vec![vec![0.2, 0.8]; 4];
        assert!(variance_trace(&outputs).unwrap().abs() < 1e-15);
    }

    #[test]
    fn variance_trace_direct_value() {
        let outputs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let v = variance_trace(&outputs).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_output_rejected() {
        let outputs = vec![vec![1.0, 0.0]];
        assert!(matches!(
            mutual_information(&outputs),
            Err(MetricsError::TooFewOutputs { .. })
        ));
    }

    #[test]
    fn decide_boundary_is_clean() {
        let tau = DetectorThreshold::new(0.1).unwrap();
        assert_eq!(decide(0.0, tau).unwrap(), Verdict::Clean);
        assert_eq!(decide(0.1, tau).unwrap(), Verdict::Clean);
        assert_eq!(decide(0.1000001, tau).unwrap(), Verdict::Adversarial);
    }

    #[test]
    fn decide_rejects_nan() {
        let tau = DetectorThreshold::new(0.0).unwrap();
        assert!(decide(f64::NAN, tau).is_err());
    }

    #[test]
    fn raising_threshold_never_flips_clean_to_adversarial() {
        let score = 0.42;
        let mut prev = decide(score, DetectorThreshold::new(-1.0).unwrap()).unwrap();
        for i in 0..100 {
            let tau = -1.0 + i as f64 * 0.05;
            let cur = decide(score, DetectorThreshold::new(tau).unwrap()).unwrap();
            if prev == Verdict::Clean {
                assert_eq!(cur, Verdict::Clean);
            }
            prev = cur;
        }
    }
}
