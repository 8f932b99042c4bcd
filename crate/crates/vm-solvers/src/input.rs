//! Solver input and the simplex-vector type shared by all solvers.

use crate::error::{Result, SolverError};

/// Coefficients of one layer-wise variance minimization instance.
///
/// `alpha[i]` is the squared activation of hidden unit `i`; `c` is the draw
/// count, accepted as a positive real since it is set as a fraction of the
/// number of nonzero activations. Only the `support` (indices with strictly
/// positive coefficients) participates in optimization: mass placed on a
/// zero coefficient is wasted because that unit's term is constant.
#[derive(Debug, Clone)]
pub struct SolverInput {
    alpha: Vec<f64>,
    c: f64,
    support: Vec<usize>,
}

impl SolverInput {
    pub fn new(alpha: Vec<f64>, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(SolverError::InvalidInput(format!(
                "draw count must be a positive real, got {c}"
            )));
        }
        if alpha.is_empty() {
            return Err(SolverError::InvalidInput("alpha is empty".into()));
        }
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(SolverError::InvalidInput(
                "alpha entries must be finite and nonnegative".into(),
            ));
        }
        let support: Vec<usize> = alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| **a > 0.0)
            .map(|(i, _)| i)
            .collect();
        if support.is_empty() {
            return Err(SolverError::EmptySupport);
        }
        Ok(Self { alpha, c, support })
    }

    /// Builds the instance from raw activations: `alpha[i] = x[i]^2`.
    pub fn from_activations(x: &[f64], c: f64) -> Result<Self> {
        Self::new(x.iter().map(|v| v * v).collect(), c)
    }

    #[inline]
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }

    #[inline]
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Number of active coefficients.
    #[inline]
    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    /// Active coefficients in support order.
    pub fn support_alpha(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.alpha[i]).collect()
    }
}

/// A probability vector: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Validates and wraps. Entries must lie in `[0, 1]` (up to 1e-12 noise,
    /// which is clamped) and sum to 1 within 1e-9.
    pub fn new(mut p: Vec<f64>) -> Result<Self> {
        for v in p.iter_mut() {
            if !v.is_finite() {
                return Err(SolverError::NotSimplex("non-finite entry".into()));
            }
            if *v < 0.0 {
                if *v < -1e-12 {
                    return Err(SolverError::NotSimplex(format!("negative entry {v}")));
                }
                *v = 0.0;
            }
            if *v > 1.0 {
                if *v > 1.0 + 1e-12 {
                    return Err(SolverError::NotSimplex(format!("entry {v} above one")));
                }
                *v = 1.0;
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SolverError::NotSimplex(format!("sum {sum} not 1")));
        }
        Ok(Self(p))
    }

    /// Uniform distribution over the support indices of `input`, zero elsewhere.
    pub fn uniform_over(input: &SolverInput) -> Self {
        let mut p = vec![0.0; input.dim()];
        let w = 1.0 / input.support_len() as f64;
        for &i in input.support() {
            p[i] = w;
        }
        Self(p)
    }

    /// Scatters per-support values into a full-length vector (zero off support)
    /// and normalizes the scattered mass to sum exactly one.
    pub(crate) fn scatter_normalized(
        dim: usize,
        support: &[usize],
        values: &[f64],
    ) -> Result<Self> {
        debug_assert_eq!(support.len(), values.len());
        let sum: f64 = values.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(SolverError::NotSimplex(format!(
                "support mass {sum} not normalizable"
            )));
        }
        let mut p = vec![0.0; dim];
        for (&i, &v) in support.iter().zip(values) {
            p[i] = v / sum;
        }
        Self::new(p)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for ProbabilityVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_excludes_zeros() {
        let input = SolverInput::new(vec![1.0, 0.0, 2.0], 3.0).unwrap();
        assert_eq!(input.support(), &[0, 2]);
        assert_eq!(input.support_alpha(), vec![1.0, 2.0]);
    }

    #[test]
    fn all_zero_alpha_rejected() {
        assert!(matches!(
            SolverInput::new(vec![0.0, 0.0], 1.0),
            Err(SolverError::EmptySupport)
        ));
    }

    #[test]
    fn bad_draw_count_rejected() {
        assert!(SolverInput::new(vec![1.0], 0.0).is_err());
        assert!(SolverInput::new(vec![1.0], -2.0).is_err());
        assert!(SolverInput::new(vec![1.0], f64::NAN).is_err());
    }

    #[test]
    fn negative_alpha_rejected() {
        assert!(SolverInput::new(vec![1.0, -0.1], 1.0).is_err());
    }

    #[test]
    fn from_activations_squares() {
        let input = SolverInput::from_activations(&[3.0, -4.0, 0.0], 2.0).unwrap();
        assert_eq!(input.alpha(), &[9.0, 16.0, 0.0]);
        assert_eq!(input.support(), &[0, 1]);
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.6, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1]).is_err());
        // Tiny negative noise is clamped.
        let p = ProbabilityVector::new(vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn uniform_over_support() {
        let input = SolverInput::new(vec![1.0, 0.0, 5.0, 2.0], 1.0).unwrap();
        let u = ProbabilityVector::uniform_over(&input);
        assert_eq!(u.as_slice(), &[1.0 / 3.0, 0.0, 1.0 / 3.0, 1.0 / 3.0]);
    }
}
