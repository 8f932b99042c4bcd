//! Closed-form approximate solvers for the small- and large-draw regimes.

use crate::error::Result;
use crate::input::{ProbabilityVector, SolverInput};

/// Small-draw closed form: probabilities proportional to activation
/// magnitudes, `p_i = sqrt(α_i) / Σ_j sqrt(α_j) = |x_i| / Σ_j |x_j|`.
pub fn solve_linear(input: &SolverInput) -> Result<ProbabilityVector> {
    let values: Vec<f64> = input
        .support_alpha()
        .iter()
        .map(|a| a.sqrt())
        .collect();
    ProbabilityVector::scatter_normalized(input.dim(), input.support(), &values)
}

/// Floor applied to `C·α_i` before taking logs, so vanishing coefficients
/// clip to zero probability instead of producing `-inf`.
const LOG_FLOOR: f64 = 1e-300;

/// Large-draw closed form: `p_i = [ln(C α_i)/C + β]_+` with one fixed-point
/// correction of the normalization constant `β`, then an exact renormalization
/// of the positive part.
pub fn solve_log(input: &SolverInput) -> Result<ProbabilityVector> {
    let c = input.c();
    let raw: Vec<f64> = input
        .support_alpha()
        .iter()
        .map(|a| (c * a).max(LOG_FLOOR).ln() / c)
        .collect();
    let h = raw.len() as f64;

    // Initialize beta so the unclipped vector sums to one.
    let mut beta = (1.0 - raw.iter().sum::<f64>()) / h;
    let clip = |beta: f64| -> Vec<f64> { raw.iter().map(|r| (r + beta).max(0.0)).collect() };
    let mut p = clip(beta);

    // One fixed-point pass: redistribute the missing mass over the surviving
    // positive entries, then recompute the clipped vector.
    let positive: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    let mass: f64 = positive.iter().map(|&i| p[i]).sum();
    beta += (1.0 - mass) / positive.len() as f64;
    p = clip(beta);

    ProbabilityVector::scatter_normalized(input.dim(), input.support(), &p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_matches_magnitudes() {
        let input = SolverInput::from_activations(&[3.0, -4.0, 0.0], 1.0).unwrap();
        let p = solve_linear(&input).unwrap();
        assert!((p[0] - 3.0 / 7.0).abs() < 1e-15);
        assert!((p[1] - 4.0 / 7.0).abs() < 1e-15);
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn linear_uniform_on_equal_alpha() {
        let input = SolverInput::new(vec![0.3; 5], 2.0).unwrap();
        let p = solve_linear(&input).unwrap();
        for &v in p.iter() {
            assert!((v - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_single_support_is_indicator() {
        let input = SolverInput::new(vec![0.0, 0.0, 4.2], 1.0).unwrap();
        let p = solve_linear(&input).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn log_uniform_on_equal_alpha() {
        let input = SolverInput::new(vec![0.125; 8], 40.0).unwrap();
        let p = solve_log(&input).unwrap();
        for &v in p.iter() {
            assert!((v - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn log_two_equal_entries() {
        // Both raw terms equal ln(10)/10; beta absorbs the rest of the mass.
        let input = SolverInput::new(vec![1.0, 1.0], 10.0).unwrap();
        let p = solve_log(&input).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!((p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_clips_vanishing_coefficient() {
        // alpha = [1, 1e-9, 2], C = 5: middle entry clips to zero, and the
        // survivors satisfy p2 - p0 = ln(2)/5 with p0 + p2 = 1.
        let input = SolverInput::new(vec![1.0, 1e-9, 2.0], 5.0).unwrap();
        let p = solve_log(&input).unwrap();
        assert_eq!(p[1], 0.0);
        let expect0 = (1.0 - 2.0_f64.ln() / 5.0) / 2.0;
        let expect2 = (1.0 + 2.0_f64.ln() / 5.0) / 2.0;
        assert!((p[0] - expect0).abs() < 1e-12, "{} vs {expect0}", p[0]);
        assert!((p[2] - expect2).abs() < 1e-12, "{} vs {expect2}", p[2]);
    }

    #[test]
    fn log_satisfies_single_multiplier_kkt_when_unclipped() {
        // With a mild spread no entry clips; then C α_i e^{-C p_i} must be a
        // common constant across the support.
        let input = SolverInput::new(vec![0.9, 1.1, 1.0, 1.05], 30.0).unwrap();
        let p = solve_log(&input).unwrap();
        assert!(p.iter().all(|&v| v > 0.0));
        let lambdas: Vec<f64> = (0..4)
            .map(|i| input.c() * input.alpha()[i] * (-input.c() * p[i]).exp())
            .collect();
        let (lo, hi) = lambdas
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        assert!((hi - lo) / hi <= 1e-6, "multiplier spread {lo}..{hi}");
    }
}
