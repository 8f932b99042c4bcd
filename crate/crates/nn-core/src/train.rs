//! Plain SGD training with seeded, reproducible shuffling and init.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::activation::Activation;
use crate::error::{NnError, Result};
use crate::gradient::{accumulate_param_grads, ParamGrads};
use crate::linalg::Matrix;
use crate::network::{argmax, DenseLayer, NetworkSpec};

/// SGD hyperparameters. All fields validated by [`TrainConfig::validate`].
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(NnError::InvalidConfig("learning rate must be > 0".into()));
        }
        if self.epochs == 0 {
            return Err(NnError::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(NnError::InvalidConfig("batch size must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 100,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Builds a randomly initialized classifier net. `arch` lists all dimensions,
/// input first, class count last; hidden layers use `hidden`, the final layer
/// is softmax. Weights are uniform in `±1/sqrt(fan_in)`, biases zero.
pub fn init_network(arch: &[usize], hidden: Activation, seed: u64) -> Result<NetworkSpec> {
    if arch.len() < 2 {
        return Err(NnError::InvalidConfig(
            "arch needs at least input and output sizes".into(),
        ));
    }
    if arch.contains(&0) {
        return Err(NnError::InvalidConfig("layer sizes must be > 0".into()));
    }
    if hidden == Activation::Softmax {
        return Err(NnError::InvalidConfig(
            "softmax is reserved for the final layer".into(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(arch.len() - 1);
    for l in 0..arch.len() - 1 {
        let (fan_in, fan_out) = (arch[l], arch[l + 1]);
        let limit = 1.0 / (fan_in as f64).sqrt();
        let mut w = Matrix::zeros(fan_out, fan_in);
        for v in w.data_mut() {
            *v = rng.random_range(-limit..limit);
        }
        let act = if l + 2 == arch.len() {
            Activation::Softmax
        } else {
            hidden
        };
        layers.push(DenseLayer::new(w, vec![0.0; fan_out], act)?);
    }
    NetworkSpec::new(layers)
}

/// Trains a dense softmax classifier by minibatch SGD on cross-entropy.
///
/// Reproducible: a fixed `cfg.seed` yields bit-identical weights across runs.
pub fn train_sgd(
    inputs: &[Vec<f64>],
    labels: &[usize],
    arch: &[usize],
    hidden: Activation,
    cfg: &TrainConfig,
) -> Result<NetworkSpec> {
    cfg.validate()?;
    if inputs.is_empty() {
        return Err(NnError::EmptyDataset);
    }
    if inputs.len() != labels.len() {
        return Err(NnError::ShapeMismatch {
            expected: inputs.len(),
            actual: labels.len(),
        });
    }
    let dim = inputs[0].len();
    if arch.first() != Some(&dim) {
        return Err(NnError::InvalidConfig(format!(
            "arch input size {:?} does not match data dimension {dim}",
            arch.first()
        )));
    }
    let classes = *arch.last().unwrap();
    if inputs.iter().any(|x| x.len() != dim) {
        return Err(NnError::InvalidConfig("inconsistent input dims".into()));
    }
    if labels.iter().any(|&l| l >= classes) {
        return Err(NnError::LabelOutOfRange {
            label: *labels.iter().max().unwrap(),
            classes,
        });
    }

    let mut net = init_network(arch, hidden, cfg.seed)?;
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed.wrapping_add(1));

    for epoch in 0..cfg.epochs {
        shuffle(&mut order, &mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let mut grads = ParamGrads::zeros_like(&net);
            let mut batch_loss = 0.0;
            for &idx in batch {
                let trace = net.forward_full(&inputs[idx])?;
                batch_loss +=
                    accumulate_param_grads(&net, &inputs[idx], &trace, labels[idx], &mut grads);
            }
            if !batch_loss.is_finite() {
                return Err(NnError::TrainingDiverged {
                    epoch,
                    loss: batch_loss,
                });
            }
            grads.scale(1.0 / batch.len() as f64);
            net = apply_step(net, &grads, cfg.learning_rate)?;
        }
    }
    Ok(net)
}

fn apply_step(net: NetworkSpec, grads: &ParamGrads, lr: f64) -> Result<NetworkSpec> {
    let mut layers = net.layers().to_vec();
    for (l, layer) in layers.iter_mut().enumerate() {
        for (w, g) in layer
            .weights
            .data_mut()
            .iter_mut()
            .zip(grads.d_weights[l].data())
        {
            *w -= lr * g;
        }
        for (b, g) in layer.bias.iter_mut().zip(&grads.d_bias[l]) {
            *b -= lr * g;
        }
    }
    NetworkSpec::new(layers)
}

/// Fisher-Yates with the given generator.
fn shuffle<R: Rng>(order: &mut [usize], rng: &mut R) {
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
}

/// Fraction of samples whose argmax prediction matches the label.
pub fn accuracy(net: &NetworkSpec, inputs: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if inputs.is_empty() {
        return Err(NnError::EmptyDataset);
    }
    let mut hits = 0usize;
    for (x, &l) in inputs.iter().zip(labels) {
        let trace = net.forward_full(x)?;
        if argmax(trace.output()) == l {
            hits += 1;
        }
    }
    Ok(hits as f64 / inputs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable_data(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        // Two 2-D clusters separated by the line x0 = x1.
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for i in 0..n {
            let cls = i % 2;
            let (cx, cy) = if cls == 0 { (0.25, 0.75) } else { (0.75, 0.25) };
            xs.push(vec![
                cx + rng.random_range(-0.15..0.15),
                cy + rng.random_range(-0.15..0.15),
            ]);
            ys.push(cls);
        }
        (xs, ys)
    }

    #[test]
    fn trains_separable_data_above_95_percent() {
        let (xs, ys) = separable_data(200, 7);
        let cfg = TrainConfig {
            learning_rate: 0.5,
            epochs: 60,
            batch_size: 16,
            seed: 3,
        };
        let net = train_sgd(&xs, &ys, &[2, 8, 2], Activation::Tanh, &cfg).unwrap();
        let acc = accuracy(&net, &xs, &ys).unwrap();
        assert!(acc >= 0.95, "train accuracy {acc} below 0.95");
    }

    #[test]
    fn zero_epochs_rejected() {
        let (xs, ys) = separable_data(10, 0);
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train_sgd(&xs, &ys, &[2, 4, 2], Activation::Tanh, &cfg),
            Err(NnError::InvalidConfig(_))
        ));
    }

    #[test]
    fn empty_dataset_rejected() {
        let cfg = TrainConfig::default();
        assert!(matches!(
            train_sgd(&[], &[], &[2, 2], Activation::Tanh, &cfg),
            Err(NnError::EmptyDataset)
        ));
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let (xs, ys) = separable_data(40, 11);
        let cfg = TrainConfig {
            learning_rate: 0.3,
            epochs: 5,
            batch_size: 8,
            seed: 42,
        };
        let a = train_sgd(&xs, &ys, &[2, 6, 2], Activation::Relu, &cfg).unwrap();
        let b = train_sgd(&xs, &ys, &[2, 6, 2], Activation::Relu, &cfg).unwrap();
        for (la, lb) in a.layers().iter().zip(b.layers()) {
            assert_eq!(la.weights.data(), lb.weights.data());
            assert_eq!(la.bias, lb.bias);
        }
    }
}
