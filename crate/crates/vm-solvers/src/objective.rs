//! Objective evaluators and the Bernoulli reduction.

use crate::input::{ProbabilityVector, SolverInput};

/// Layer-wise variance cost `Σ_{i in support} α_i / (1 - (1-p_i)^C)`.
///
/// Returns `+∞` when some supported entry has `p_i = 0`: that unit would never
/// be picked, so its variance contribution is unbounded.
pub fn exact_objective(p: &ProbabilityVector, input: &SolverInput) -> f64 {
    let c = input.c();
    let mut total = 0.0;
    for &i in input.support() {
        let pi = p[i];
        if pi <= 0.0 {
            return f64::INFINITY;
        }
        total += input.alpha()[i] / (1.0 - (1.0 - pi).powf(c));
    }
    total
}

/// Exponential surrogate `Σ_{i in support} α_i / (1 - e^{-C p_i})`, an upper
/// bound of [`exact_objective`] since `1-(1-p)^C >= 1-e^{-Cp}` on `[0,1]`.
pub fn surrogate_objective(p: &ProbabilityVector, input: &SolverInput) -> f64 {
    let c = input.c();
    let mut total = 0.0;
    for &i in input.support() {
        let pi = p[i];
        if pi <= 0.0 {
            return f64::INFINITY;
        }
        total += input.alpha()[i] / (-((-c * pi).exp() - 1.0));
    }
    total
}

/// Marginal pick probabilities induced by `C` categorical draws with
/// replacement: `π_i = 1 - (1 - p_i)^C`.
pub fn bernoulli_params(p: &ProbabilityVector, c: f64) -> Vec<f64> {
    assert!(c > 0.0, "draw count must be positive");
    p.iter().map(|&pi| 1.0 - (1.0 - pi).powf(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_objective_direct_value() {
        let input = SolverInput::new(vec![1.0, 1.0], 1.0).unwrap();
        let p = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        assert!((exact_objective(&p, &input) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn exact_objective_single_support() {
        let input = SolverInput::new(vec![1.0, 0.0], 17.3).unwrap();
        let p = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        assert!((exact_objective(&p, &input) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_objective_pole_at_zero() {
        let input = SolverInput::new(vec![1.0, 1.0], 2.0).unwrap();
        let p = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        assert!(exact_objective(&p, &input).is_infinite());
        assert!(surrogate_objective(&p, &input).is_infinite());
    }

    #[test]
    fn surrogate_objective_direct_value() {
        // alpha=[1], p=[1], C = ln 2 so e^{-C} = 0.5 and the value is 2.
        let input = SolverInput::new(vec![1.0], 2.0_f64.ln()).unwrap();
        let p = ProbabilityVector::new(vec![1.0]).unwrap();
        assert!((surrogate_objective(&p, &input) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn surrogate_dominates_exact_on_random_points() {
        // 1000 seeded pseudo-random (alpha, p, C) triples.
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let h = 2 + (next() * 6.0) as usize;
            let alpha: Vec<f64> = (0..h).map(|_| next() * 3.0 + 1e-6).collect();
            let c = 0.2 + next() * 50.0;
            let input = SolverInput::new(alpha, c).unwrap();
            let mut raw: Vec<f64> = (0..h).map(|_| next() + 1e-9).collect();
            let sum: f64 = raw.iter().sum();
            raw.iter_mut().for_each(|v| *v /= sum);
            let p = ProbabilityVector::new(raw).unwrap();
            let exact = exact_objective(&p, &input);
            let surrogate = surrogate_objective(&p, &input);
            assert!(
                surrogate >= exact - 1e-9 * exact.abs(),
                "surrogate {surrogate} below exact {exact}"
            );
        }
    }

    #[test]
    fn bernoulli_params_values() {
        let p = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let pi = bernoulli_params(&p, 2.0);
        assert!((pi[0] - 0.75).abs() < 1e-12);

        let p = ProbabilityVector::new(vec![0.1, 0.9]).unwrap();
        let pi = bernoulli_params(&p, 20.0);
        assert!((pi[0] - 0.8784233454094307).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_params_boundaries() {
        let p = ProbabilityVector::new(vec![0.0, 1.0]).unwrap();
        let pi = bernoulli_params(&p, 7.0);
        assert_eq!(pi[0], 0.0);
        assert_eq!(pi[1], 1.0);
    }
}
