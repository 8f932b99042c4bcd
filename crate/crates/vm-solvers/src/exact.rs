//! Exact minimizer of the exponential-surrogate variance cost.
//!
//! Stationarity of the Lagrangian reduces each coordinate to the feasible root
//! of a quadratic in `y_i = e^{-C p_i}`, leaving a scalar root-finding problem
//! in the (scaled) multiplier `ρ`:
//!
//! `F(ρ) = Σ_i ln(2ρ + α_i - sqrt((2ρ+α_i)^2 - 4ρ^2)) - h ln(2ρ) + C = 0`
//!
//! `F` is strictly increasing on `ρ > 0` with range `(-∞, C)`, so the root is
//! unique. We bracket it by geometric expansion from `ρ_0 = Σα_i/h`, bisect to
//! relative width 1e-12, then attempt a few Newton steps inside the final
//! bracket; the bisection result stands whenever Newton does not improve the
//! residual.
//!
//! All evaluations use the cancellation-free form
//! `2ρ + α - sqrt((2ρ+α)^2 - 4ρ^2) = 4ρ^2 / (2ρ + α + s)` with
//! `s = sqrt(α (4ρ + α))`, which is accurate for `ρ ≫ α` as well as `ρ ≪ α`.

use crate::error::{Result, SolverError};
use crate::input::{ProbabilityVector, SolverInput};

const REL_BRACKET_WIDTH: f64 = 1e-12;
const MAX_EXPANSIONS: usize = 4000;
const MAX_BISECTIONS: usize = 20000;
const NEWTON_STEPS: usize = 4;

/// Diagnostics of one exact solve.
#[derive(Debug, Clone)]
pub struct SolverState {
    /// Lagrange multiplier of the surrogate problem at the solution; satisfies
    /// `-C α_i e^{-C p_i} / (1 - e^{-C p_i})^2 + rho = 0` on the support.
    /// Equals `C` times the root of the scalar equation above.
    pub rho: f64,
    /// Normalization constant `-ln(rho)/C` associated with the multiplier.
    pub beta: f64,
    /// Root-equation residual `|F(ρ*)|` at termination.
    pub residual: f64,
    /// Bracket expansions plus bisection plus Newton iterations used.
    pub iterations: usize,
}

/// Value of the scalar root equation `F(ρ)` for the instance's support.
///
/// Exposed so callers can probe monotonicity and bracketing independently.
pub fn root_equation(input: &SolverInput, rho: f64) -> f64 {
    debug_assert!(rho > 0.0);
    let mut f = input.c();
    for &i in input.support() {
        let a = input.alpha()[i];
        let s = (a * (4.0 * rho + a)).sqrt();
        f += (2.0 * rho).ln() - (2.0 * rho + a + s).ln();
    }
    f
}

fn root_equation_derivative(input: &SolverInput, rho: f64) -> f64 {
    let mut d = 0.0;
    for &i in input.support() {
        let a = input.alpha()[i];
        let s = (a * (4.0 * rho + a)).sqrt();
        d += 1.0 / rho - (2.0 + 2.0 * a / s) / (2.0 * rho + a + s);
    }
    d
}

/// Solves the surrogate variance minimization exactly.
///
/// Returns the optimal sampling probabilities (zero off support, sum 1) and
/// the solver diagnostics. `tol` bounds the accepted simplex-sum drift before
/// the final normalization; the root itself is always bisected to relative
/// bracket width 1e-12.
pub fn solve_exact(input: &SolverInput, tol: f64) -> Result<(ProbabilityVector, SolverState)> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(SolverError::InvalidTolerance(tol));
    }
    let c = input.c();
    let support = input.support();
    let h = support.len() as f64;

    // Algorithm start point: mean of the active coefficients.
    let rho0 = input.support_alpha().iter().sum::<f64>() / h;
    let mut iterations = 0usize;

    // Geometric bracket expansion. F is increasing: walk lo down until
    // F(lo) <= 0 and hi up until F(hi) >= 0.
    let mut lo = rho0;
    let mut hi = rho0;
    while root_equation(input, lo) > 0.0 {
        lo *= 0.5;
        iterations += 1;
        if iterations > MAX_EXPANSIONS || lo < 1e-300 {
            return Err(SolverError::BracketFailure { tried: iterations });
        }
    }
    while root_equation(input, hi) < 0.0 {
        hi *= 2.0;
        iterations += 1;
        if iterations > MAX_EXPANSIONS || !hi.is_finite() {
            return Err(SolverError::BracketFailure { tried: iterations });
        }
    }

    // Bisection to relative width.
    let mut bisections = 0usize;
    while hi - lo > REL_BRACKET_WIDTH * hi && bisections < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if root_equation(input, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        bisections += 1;
    }
    iterations += bisections;

    let mut rho = 0.5 * (lo + hi);
    let mut best_abs = root_equation(input, rho).abs();

    // Optional Newton polish inside the final bracket; keep bisection's answer
    // unless the residual strictly improves.
    let mut x = rho;
    for _ in 0..NEWTON_STEPS {
        let f = root_equation(input, x);
        let d = root_equation_derivative(input, x);
        if d <= 0.0 || !d.is_finite() {
            break;
        }
        let next = x - f / d;
        if !(next > lo && next < hi) {
            break;
        }
        x = next;
        iterations += 1;
        let abs = root_equation(input, x).abs();
        if abs < best_abs {
            best_abs = abs;
            rho = x;
        } else {
            break;
        }
    }

    // Recover probabilities: p_i = ln((2ρ + α_i + s_i) / 2ρ) / C.
    let mut values = Vec::with_capacity(support.len());
    for &i in support {
        let a = input.alpha()[i];
        let s = (a * (4.0 * rho + a)).sqrt();
        values.push(((2.0 * rho + a + s) / (2.0 * rho)).ln() / c);
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(SolverError::NotSimplex(format!(
            "recovered probabilities sum to {sum}, outside tolerance {tol}"
        )));
    }
    let p = ProbabilityVector::scatter_normalized(input.dim(), support, &values)?;

    let multiplier = c * rho;
    let state = SolverState {
        rho: multiplier,
        beta: -multiplier.ln() / c,
        residual: best_abs,
        iterations,
    };
    Ok((p, state))
}

/// Largest relative stationarity violation of `p` on the support, using the
/// multiplier recorded in `state`.
pub fn kkt_residual(input: &SolverInput, p: &ProbabilityVector, state: &SolverState) -> f64 {
    let c = input.c();
    let mut worst = 0.0_f64;
    for &i in input.support() {
        let y = (-c * p[i]).exp();
        let grad = -c * input.alpha()[i] * y / ((1.0 - y) * (1.0 - y));
        worst = worst.max((grad + state.rho).abs() / state.rho);
    }
    worst
}
