//! Backpropagation: cross-entropy loss, input gradients for attack crafting,
//! and parameter gradients for training.

use crate::error::{NnError, Result};
use crate::linalg::Matrix;
use crate::network::{ActivationTrace, NetworkSpec};

/// Natural-log cross-entropy of a softmax output against an integer label.
pub fn cross_entropy(y: &[f64], label: usize) -> f64 {
    -(y[label].max(1e-300)).ln()
}

/// Gradient of the cross-entropy loss w.r.t. the network input, by
/// backpropagation through the full deterministic network.
pub fn grad_input(net: &NetworkSpec, x: &[f64], label: usize) -> Result<Vec<f64>> {
    net.require_classifier()?;
    if label >= net.output_dim() {
        return Err(NnError::LabelOutOfRange {
            label,
            classes: net.output_dim(),
        });
    }
    let trace = net.forward_full(x)?;
    let delta = output_delta(&trace, label);
    Ok(backprop_to_input(net, &trace, delta))
}

/// Gradient of the loss w.r.t. the final pre-activation: `y - onehot(label)`.
/// This folds softmax and cross-entropy together.
fn output_delta(trace: &ActivationTrace, label: usize) -> Vec<f64> {
    let mut delta = trace.output().to_vec();
    delta[label] -= 1.0;
    delta
}

/// Propagates a final-layer delta back to the input vector.
fn backprop_to_input(net: &NetworkSpec, trace: &ActivationTrace, mut delta: Vec<f64>) -> Vec<f64> {
    for l in (0..net.num_layers()).rev() {
        let layer = &net.layers()[l];
        let mut upstream = layer.weights.matvec_t(&delta);
        if l > 0 {
            let below = &net.layers()[l - 1];
            for (i, u) in upstream.iter_mut().enumerate() {
                *u *= below
                    .activation
                    .derivative(trace.pre[l - 1][i], trace.post[l - 1][i]);
            }
            delta = upstream;
        } else {
            return upstream;
        }
    }
    unreachable!("network has at least one layer")
}

/// Per-layer parameter gradients of the cross-entropy loss for one sample.
pub struct ParamGrads {
    pub d_weights: Vec<Matrix>,
    pub d_bias: Vec<Vec<f64>>,
}

impl ParamGrads {
    pub fn zeros_like(net: &NetworkSpec) -> Self {
        Self {
            d_weights: net
                .layers()
                .iter()
                .map(|l| Matrix::zeros(l.out_dim(), l.in_dim()))
                .collect(),
            d_bias: net.layers().iter().map(|l| vec![0.0; l.out_dim()]).collect(),
        }
    }

    pub fn scale(&mut self, s: f64) {
        for w in &mut self.d_weights {
            for v in w.data_mut() {
                *v *= s;
            }
        }
        for b in &mut self.d_bias {
            for v in b.iter_mut() {
                *v *= s;
            }
        }
    }
}

/// Accumulates parameter gradients for one `(x, label)` sample into `grads`,
/// returning the sample loss. `trace` must come from `forward_full(x)`.
pub fn accumulate_param_grads(
    net: &NetworkSpec,
    x: &[f64],
    trace: &ActivationTrace,
    label: usize,
    grads: &mut ParamGrads,
) -> f64 {
    let loss = cross_entropy(trace.output(), label);
    let mut delta = output_delta(trace, label);
    for l in (0..net.num_layers()).rev() {
        let layer = &net.layers()[l];
        let input: &[f64] = if l == 0 { x } else { &trace.post[l - 1] };
        let dw = &mut grads.d_weights[l];
        for (r, &dr) in delta.iter().enumerate() {
            grads.d_bias[l][r] += dr;
            for (c, xi) in input.iter().enumerate() {
                let cur = dw.get(r, c);
                dw.set(r, c, cur + dr * xi);
            }
        }
        if l > 0 {
            let mut upstream = layer.weights.matvec_t(&delta);
            let below = &net.layers()[l - 1];
            for (i, u) in upstream.iter_mut().enumerate() {
                *u *= below
                    .activation
                    .derivative(trace.pre[l - 1][i], trace.post[l - 1][i]);
            }
            delta = upstream;
        }
    }
    loss
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;
    use crate::network::DenseLayer;

    #[test]
    fn zero_first_layer_gives_zero_input_gradient() {
        let net = NetworkSpec::new(vec![
            DenseLayer::new(Matrix::zeros(3, 2), vec![0.1, 0.2, -0.3], Activation::Tanh).unwrap(),
            DenseLayer::new(
                Matrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, -1.0]]),
                vec![0.0, 0.0],
                Activation::Softmax,
            )
            .unwrap(),
        ])
        .unwrap();
        let g = grad_input(&net, &[0.5, -0.7], 1).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn softmax_linear_gradient_is_wt_times_residual() {
        // No hidden layer: grad_x CE = Wᵀ (y - onehot(label))
        let w = Matrix::from_rows(&[vec![0.8, -0.1], vec![-0.4, 0.5], vec![0.2, 0.3]]);
        let net = NetworkSpec::new(vec![DenseLayer::new(
            w.clone(),
            vec![0.05, -0.2, 0.0],
            Activation::Softmax,
        )
        .unwrap()])
        .unwrap();
        let x = [0.9, -1.3];
        let label = 2;
        let y = net.forward_full(&x).unwrap().output().to_vec();
        let mut resid = y.clone();
        resid[label] -= 1.0;
        let expect = w.matvec_t(&resid);
        let got = grad_input(&net, &x, label).unwrap();
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn label_out_of_range_rejected() {
        let net = NetworkSpec::new(vec![DenseLayer::new(
            Matrix::identity(2),
            vec![0.0; 2],
            Activation::Softmax,
        )
        .unwrap()])
        .unwrap();
        assert!(matches!(
            grad_input(&net, &[0.0, 0.0], 2),
            Err(NnError::LabelOutOfRange { .. })
        ));
    }
}
