//! Network structure and the deterministic forward pass.

use crate::activation::Activation;
use crate::error::{NnError, Result};
use crate::linalg::Matrix;

/// One dense layer: `post = activation(W x + b)` with `W` of shape
/// `(out_dim, in_dim)` in row-major order.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(NnError::ShapeMismatch {
                expected: weights.rows(),
                actual: bias.len(),
            });
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    /// Affine part `W x + b` of the layer.
    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        let mut pre = self.weights.matvec(x);
        for (p, b) in pre.iter_mut().zip(&self.bias) {
            *p += b;
        }
        pre
    }
}

/// An ordered stack of dense layers; the trained deterministic weights of the
/// full network live here and are immutable after construction.
#[derive(Debug, Clone)]
pub struct NetworkSpec {
    layers: Vec<DenseLayer>,
}

impl NetworkSpec {
    /// Validates structural invariants: at least one layer, chained dimensions,
    /// finite parameters, and softmax nowhere except (possibly) the final layer.
    ///
    /// Classification-specific checks (softmax output) live in
    /// [`NetworkSpec::require_classifier`], so that plain function stacks (e.g.
    /// identity nets used in tests) can still run [`NetworkSpec::forward_full`].
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(NnError::InvalidNetwork("no layers".into()));
        }
        for (l, pair) in layers.windows(2).enumerate() {
            if pair[1].in_dim() != pair[0].out_dim() {
                return Err(NnError::InvalidNetwork(format!(
                    "layer {} outputs {} but layer {} expects {}",
                    l,
                    pair[0].out_dim(),
                    l + 1,
                    pair[1].in_dim()
                )));
            }
        }
        for (l, layer) in layers.iter().enumerate() {
            if !layer.weights.is_finite() || !layer.bias.iter().all(|b| b.is_finite()) {
                return Err(NnError::InvalidNetwork(format!(
                    "layer {l} has non-finite parameters"
                )));
            }
            if layer.activation == Activation::Softmax && l + 1 != layers.len() {
                return Err(NnError::InvalidNetwork(format!(
                    "softmax at non-final layer {l}"
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Errors unless exactly the final layer uses softmax.
    pub fn require_classifier(&self) -> Result<()> {
        if self.layers.last().unwrap().activation != Activation::Softmax {
            return Err(NnError::InvalidNetwork(
                "final layer must be softmax".into(),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    #[inline]
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    /// Number of output classes.
    #[inline]
    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim()
    }

    /// Positions where a sampling unit may be placed: after the post-activation
    /// of every non-final layer.
    pub fn sampling_positions(&self) -> std::ops::Range<usize> {
        0..self.num_layers().saturating_sub(1)
    }

    /// Deterministic forward pass capturing every intermediate vector.
    pub fn forward_full(&self, x: &[f64]) -> Result<ActivationTrace> {
        if x.len() != self.input_dim() {
            return Err(NnError::ShapeMismatch {
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        let mut pre = Vec::with_capacity(self.num_layers());
        let mut post = Vec::with_capacity(self.num_layers());
        let mut cur = x.to_vec();
        for layer in &self.layers {
            let z = layer.affine(&cur);
            cur = layer.activation.apply(&z);
            pre.push(z);
            post.push(cur.clone());
        }
        Ok(ActivationTrace { pre, post })
    }

    /// Class prediction of the full network.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let trace = self.forward_full(x)?;
        Ok(argmax(trace.output()))
    }
}

/// Index of the largest entry (first wins on ties).
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &val) in v.iter().enumerate() {
        if val > v[best] {
            best = i;
        }
    }
    best
}

/// Per-layer pre- and post-activation vectors of one deterministic pass.
#[derive(Debug, Clone)]
pub struct ActivationTrace {
    /// `pre[l] = W_l x_(l) + b_l` before the nonlinearity.
    pub pre: Vec<Vec<f64>>,
    /// `post[l]` after the nonlinearity; `post[L-1]` is the softmax output.
    pub post: Vec<Vec<f64>>,
}

impl ActivationTrace {
    /// Final output vector (softmax probabilities for classifier nets).
    pub fn output(&self) -> &[f64] {
        self.post.last().expect("trace has at least one layer")
    }

    pub fn len(&self) -> usize {
        self.post.len()
    }

    pub fn is_empty(&self) -> bool {
        self.post.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn softmax_head(in_dim: usize, weights: Matrix, bias: Vec<f64>) -> NetworkSpec {
        assert_eq!(weights.cols(), in_dim);
        NetworkSpec::new(vec![
            DenseLayer::new(weights, bias, Activation::Softmax).unwrap()
        ])
        .unwrap()
    }

    #[test]
    fn identity_single_layer_forward() {
        let net = NetworkSpec::new(vec![DenseLayer::new(
            Matrix::identity(2),
            vec![0.0, 0.0],
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        let trace = net.forward_full(&[1.0, 2.0]).unwrap();
        assert_eq!(trace.post[0], vec![1.0, 2.0]);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn softmax_output_sums_to_one() {
        let net = softmax_head(
            2,
            Matrix::from_rows(&[vec![1.5, -0.3], vec![0.2, 0.9], vec![-1.0, 2.0]]),
            vec![0.1, -0.4, 0.0],
        );
        let trace = net.forward_full(&[0.7, -1.1]).unwrap();
        let s: f64 = trace.output().iter().sum();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_layer_hand_computed_forward() {
        // Frozen against an independent matrix-arithmetic computation:
        // W1 = [[0.5,-1],[0.25,0.75],[-0.5,0.125]], b1 = [0.1,-0.2,0.05], tanh
        // W2 = [[1,-0.5,0.25],[-0.75,0.5,1.5]],     b2 = [0.0,0.1],       softmax
        // x = [1, 0]
        let net = NetworkSpec::new(vec![
            DenseLayer::new(
                Matrix::from_rows(&[vec![0.5, -1.0], vec![0.25, 0.75], vec![-0.5, 0.125]]),
                vec![0.1, -0.2, 0.05],
                Activation::Tanh,
            )
            .unwrap(),
            DenseLayer::new(
                Matrix::from_rows(&[vec![1.0, -0.5, 0.25], vec![-0.75, 0.5, 1.5]]),
                vec![0.0, 0.1],
                Activation::Softmax,
            )
            .unwrap(),
        ])
        .unwrap();
        let trace = net.forward_full(&[1.0, 0.0]).unwrap();
        let expect_post1 = [0.537_049_566_998_035_2, 0.049958374957879956, -0.4218990052500079];
        for (a, b) in trace.post[0].iter().zip(&expect_post1) {
            assert!((a - b).abs() < 1e-12, "hidden mismatch {a} vs {b}");
        }
        let expect_y = [0.788_724_168_250_799_2, 0.21127583174920092];
        for (a, b) in trace.output().iter().zip(&expect_y) {
            assert!((a - b).abs() < 1e-10, "output mismatch {a} vs {b}");
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let net = softmax_head(
            3,
            Matrix::from_rows(&[vec![0.3, -0.2, 1.0], vec![0.5, 0.1, -0.7]]),
            vec![0.0, 0.2],
        );
        let t1 = net.forward_full(&[0.2, 0.4, -0.9]).unwrap();
        let t2 = net.forward_full(&[0.2, 0.4, -0.9]).unwrap();
        assert_eq!(t1.pre, t2.pre);
        assert_eq!(t1.post, t2.post);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let net = softmax_head(2, Matrix::identity(2), vec![0.0, 0.0]);
        assert!(matches!(
            net.forward_full(&[1.0]),
            Err(NnError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn softmax_in_hidden_layer_rejected() {
        let bad = NetworkSpec::new(vec![
            DenseLayer::new(Matrix::identity(2), vec![0.0; 2], Activation::Softmax).unwrap(),
            DenseLayer::new(Matrix::identity(2), vec![0.0; 2], Activation::Softmax).unwrap(),
        ]);
        assert!(bad.is_err());
    }

    #[test]
    fn chained_dims_validated() {
        let bad = NetworkSpec::new(vec![
            DenseLayer::new(Matrix::zeros(3, 2), vec![0.0; 3], Activation::Tanh).unwrap(),
            DenseLayer::new(Matrix::zeros(2, 4), vec![0.0; 2], Activation::Softmax).unwrap(),
        ]);
        assert!(bad.is_err());
    }

    #[test]
    fn non_finite_weights_rejected() {
        let mut w = Matrix::identity(2);
        w.set(0, 1, f64::NAN);
        let bad = NetworkSpec::new(vec![DenseLayer::new(
            w,
            vec![0.0; 2],
            Activation::Softmax,
        )
        .unwrap()]);
        assert!(bad.is_err());
    }

    #[test]
    fn require_classifier_checks_final_softmax() {
        let net = NetworkSpec::new(vec![DenseLayer::new(
            Matrix::identity(2),
            vec![0.0; 2],
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        assert!(net.require_classifier().is_err());
    }
}
