//! Gradient-based attacks on the deterministic full network.
//!
//! All three attacks share one iterative driver: per step, a sign direction
//! is computed from the cross-entropy input gradient (momentum-accumulated
//! for MIM), the iterate moves by `eps_iter`, and the result is projected
//! onto the l-inf ball of radius `epsilon` around the clean input and clipped
//! to the valid box. FGSM literally is one driver step with `eps_iter =
//! epsilon`, so the reduction identities hold bitwise.
//!
//! Attacks are pure deterministic functions of `(net, x, label, cfg)`.

use nn_core::{grad_input, NetworkSpec, NnError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid attack config: {0}")]
    InvalidConfig(String),

    #[error("input outside the valid box")]
    InputOutsideBox,

    #[error("gradient turned non-finite")]
    NumericError,

    #[error(transparent)]
    Network(#[from] NnError),
}

pub type Result<T> = std::result::Result<T, AttackError>;

/// Attack family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    Fgsm,
    Bim,
    Mim,
}

impl std::fmt::Display for AttackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AttackKind::Fgsm => "fgsm",
            AttackKind::Bim => "bim",
            AttackKind::Mim => "mim",
        };
        write!(f, "{s}")
    }
}

/// Attack hyperparameters. `epsilon` and `eps_iter` are in input units;
/// inputs live in the `[box_lo, box_hi]` box.
#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub kind: AttackKind,
    pub epsilon: f64,
    pub eps_iter: f64,
    pub iters: usize,
    /// MIM momentum decay; ignored by FGSM/BIM.
    pub decay: f64,
    pub box_lo: f64,
    pub box_hi: f64,
}

impl AttackConfig {
    pub fn fgsm(epsilon: f64) -> Self {
        Self {
            kind: AttackKind::Fgsm,
            epsilon,
            eps_iter: epsilon,
            iters: 1,
            decay: 0.0,
            box_lo: 0.0,
            box_hi: 1.0,
        }
    }

    pub fn bim(epsilon: f64, eps_iter: f64, iters: usize) -> Self {
        Self {
            kind: AttackKind::Bim,
            epsilon,
            eps_iter,
            iters,
            decay: 0.0,
            box_lo: 0.0,
            box_hi: 1.0,
        }
    }

    /// Decay 1.0 is the customary momentum setting.
    pub fn mim(epsilon: f64, eps_iter: f64, iters: usize, decay: f64) -> Self {
        Self {
            kind: AttackKind::Mim,
            epsilon,
            eps_iter,
            iters,
            decay,
            box_lo: 0.0,
            box_hi: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(AttackError::InvalidConfig(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.eps_iter > 0.0 && self.eps_iter <= self.epsilon) {
            return Err(AttackError::InvalidConfig(format!(
                "eps_iter must be in (0, epsilon], got {}",
                self.eps_iter
            )));
        }
        if self.iters == 0 {
            return Err(AttackError::InvalidConfig("iters must be >= 1".into()));
        }
        if self.decay < 0.0 {
            return Err(AttackError::InvalidConfig("decay must be >= 0".into()));
        }
        let box_ok =
            self.box_lo.is_finite() && self.box_hi.is_finite() && self.box_lo < self.box_hi;
        if !box_ok {
            return Err(AttackError::InvalidConfig(format!(
                "invalid box [{}, {}]",
                self.box_lo, self.box_hi
            )));
        }
        Ok(())
    }
}

/// A crafted adversarial input paired with its clean original.
#[derive(Debug, Clone)]
pub struct AdversarialPair {
    pub clean: Vec<f64>,
    pub adversarial: Vec<f64>,
    pub label: usize,
    pub clean_prediction: usize,
    pub adversarial_prediction: usize,
}

impl AdversarialPair {
    /// `true` when the attack flipped a correct prediction.
    pub fn flipped(&self) -> bool {
        self.clean_prediction == self.label && self.adversarial_prediction != self.label
    }
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Momentum update: `g <- decay * g + grad / ||grad||_1`. A zero gradient
/// skips the normalization and accumulates nothing.
fn momentum_update(momentum: &mut [f64], grad: &[f64], decay: f64) {
    let l1: f64 = grad.iter().map(|v| v.abs()).sum();
    for (m, &gi) in momentum.iter_mut().zip(grad) {
        let normalized = if l1 > 0.0 { gi / l1 } else { gi };
        *m = decay * *m + normalized;
    }
}

fn run_attack(
    net: &NetworkSpec,
    x: &[f64],
    label: usize,
    cfg: &AttackConfig,
) -> Result<AdversarialPair> {
    cfg.validate()?;
    if x.iter().any(|&v| v < cfg.box_lo || v > cfg.box_hi) {
        return Err(AttackError::InputOutsideBox);
    }
    let clean_prediction = net.predict(x)?;

    let mut adv = x.to_vec();
    let mut momentum = vec![0.0; x.len()];
    for _ in 0..cfg.iters {
        let grad = grad_input(net, &adv, label)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(AttackError::NumericError);
        }
        let direction: Vec<f64> = match cfg.kind {
            AttackKind::Fgsm | AttackKind::Bim => grad.iter().map(|&g| sign(g)).collect(),
            AttackKind::Mim => {
                momentum_update(&mut momentum, &grad, cfg.decay);
                momentum.iter().map(|&g| sign(g)).collect()
            }
        };
        for (i, a) in adv.iter_mut().enumerate() {
            let stepped = *a + cfg.eps_iter * direction[i];
            let ball = (stepped - x[i]).clamp(-cfg.epsilon, cfg.epsilon) + x[i];
            *a = ball.clamp(cfg.box_lo, cfg.box_hi);
        }
    }

    let adversarial_prediction = net.predict(&adv)?;
    Ok(AdversarialPair {
        clean: x.to_vec(),
        adversarial: adv,
        label,
        clean_prediction,
        adversarial_prediction,
    })
}

/// Single sign step of size `epsilon`.
pub fn fgsm(net: &NetworkSpec, x: &[f64], label: usize, cfg: &AttackConfig) -> Result<AdversarialPair> {
    let mut one_step = cfg.clone();
    one_step.kind = AttackKind::Fgsm;
    one_step.iters = 1;
    one_step.eps_iter = cfg.epsilon;
    run_attack(net, x, label, &one_step)
}

/// Iterated sign steps with l-inf ball projection and box clipping.
pub fn bim(net: &NetworkSpec, x: &[f64], label: usize, cfg: &AttackConfig) -> Result<AdversarialPair> {
    let mut c = cfg.clone();
    c.kind = AttackKind::Bim;
    run_attack(net, x, label, &c)
}

/// Momentum-accumulated iterated sign steps.
pub fn mim(net: &NetworkSpec, x: &[f64], label: usize, cfg: &AttackConfig) -> Result<AdversarialPair> {
    let mut c = cfg.clone();
    c.kind = AttackKind::Mim;
    run_attack(net, x, label, &c)
}

/// Dispatches on `cfg.kind`.
pub fn craft(net: &NetworkSpec, x: &[f64], label: usize, cfg: &AttackConfig) -> Result<AdversarialPair> {
    match cfg.kind {
        AttackKind::Fgsm => fgsm(net, x, label, cfg),
        AttackKind::Bim => bim(net, x, label, cfg),
        AttackKind::Mim => mim(net, x, label, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nn_core::{cross_entropy, Activation, DenseLayer, Matrix};

    fn softmax_linear() -> NetworkSpec {
        NetworkSpec::new(vec![DenseLayer::new(
            Matrix::from_rows(&[vec![2.0, -1.0], vec![-0.5, 1.5]]),
            vec![0.1, -0.1],
            Activation::Softmax,
        )
        .unwrap()])
        .unwrap()
    }

    #[test]
    fn perturbation_entries_are_sign_steps() {
        let net = softmax_linear();
        let x = [0.5, 0.5];
        let cfg = AttackConfig::fgsm(0.1);
        let pair = fgsm(&net, &x, 0, &cfg).unwrap();
        for (a, c) in pair.adversarial.iter().zip(&pair.clean) {
            let delta = a - c;
            // In {-eps, 0, +eps} before box clipping; the box can only shrink it.
            assert!(delta.abs() <= 0.1 + 1e-12);
        }
    }

    #[test]
    fn fgsm_increases_loss_on_softmax_linear_model() {
        let net = softmax_linear();
        let x = [0.5, 0.5];
        let label = 0;
        let cfg = AttackConfig::fgsm(0.2);
        let pair = fgsm(&net, &x, label, &cfg).unwrap();
        let clean_loss = cross_entropy(net.forward_full(&x).unwrap().output(), label);
        let adv_loss = cross_entropy(net.forward_full(&pair.adversarial).unwrap().output(), label);
        assert!(
            adv_loss >= clean_loss,
            "adv {adv_loss} not above clean {clean_loss}"
        );
    }

    #[test]
    fn bim_single_iteration_equals_fgsm_bitwise() {
        let net = softmax_linear();
        let x = [0.3, 0.8];
        let f = fgsm(&net, &x, 1, &AttackConfig::fgsm(0.15)).unwrap();
        let b = bim(&net, &x, 1, &AttackConfig::bim(0.15, 0.15, 1)).unwrap();
        assert_eq!(f.adversarial, b.adversarial);
    }

    #[test]
    fn mim_zero_decay_single_iter_equals_fgsm() {
        let net = softmax_linear();
        let x = [0.6, 0.2];
        let f = fgsm(&net, &x, 0, &AttackConfig::fgsm(0.1)).unwrap();
        let m = mim(&net, &x, 0, &AttackConfig::mim(0.1, 0.1, 1, 0.0)).unwrap();
        assert_eq!(f.adversarial, m.adversarial);
    }

    #[test]
    fn momentum_accumulates_normalized_gradients() {
        let grad = [3.0, -1.0];
        let l1 = 4.0;
        let decay = 0.9;
        let mut momentum = vec![0.0; 2];
        momentum_update(&mut momentum, &grad, decay);
        momentum_update(&mut momentum, &grad, decay);
        for (m, g) in momentum.iter().zip(&grad) {
            let expect = (1.0 + decay) * g / l1;
            assert!((m - expect).abs() < 1e-15, "{m} vs {expect}");
        }
    }

    #[test]
    fn momentum_skips_normalization_on_zero_gradient() {
        let mut momentum = vec![0.5, -0.5];
        momentum_update(&mut momentum, &[0.0, 0.0], 1.0);
        assert_eq!(momentum, vec![0.5, -0.5]);
    }

    #[test]
    fn budget_and_box_respected() {
        let net = softmax_linear();
        let x = [0.05, 0.95];
        for cfg in [
            AttackConfig::fgsm(0.3),
            AttackConfig::bim(0.3, 0.05, 20),
            AttackConfig::mim(0.3, 0.05, 20, 1.0),
        ] {
            let pair = craft(&net, &x, 0, &cfg).unwrap();
            for (a, c) in pair.adversarial.iter().zip(&x) {
                assert!((a - c).abs() <= 0.3 + 1e-9);
                assert!((0.0..=1.0).contains(a));
            }
        }
    }

    #[test]
    fn attacks_are_deterministic() {
        let net = softmax_linear();
        let x = [0.4, 0.6];
        let cfg = AttackConfig::mim(0.2, 0.04, 10, 1.0);
        let a = mim(&net, &x, 1, &cfg).unwrap();
        let b = mim(&net, &x, 1, &cfg).unwrap();
        assert_eq!(a.adversarial, b.adversarial);
    }

    #[test]
    fn config_validation() {
        assert!(AttackConfig::fgsm(0.0).validate().is_err());
        assert!(AttackConfig::bim(0.1, 0.2, 5).validate().is_err()); // eps_iter > eps
        assert!(AttackConfig::bim(0.1, 0.05, 0).validate().is_err());
        let mut c = AttackConfig::mim(0.1, 0.05, 5, -0.1);
        assert!(c.validate().is_err());
        c.decay = 1.0;
        c.box_lo = 1.0;
        c.box_hi = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn input_outside_box_rejected() {
        let net = softmax_linear();
        assert!(matches!(
            fgsm(&net, &[1.5, 0.0], 0, &AttackConfig::fgsm(0.1)),
            Err(AttackError::InputOutsideBox)
        ));
    }
}
