//! Versioned JSON serialization of trained networks.
//!
//! Layout: a `format_version` tag plus per-layer records with sizes,
//! activation name, row-major weights and bias. `f64` values round-trip
//! bit-exactly through serde_json's shortest-representation encoder.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{NnError, Result};
use crate::linalg::Matrix;
use crate::network::{DenseLayer, NetworkSpec};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct LayerDto {
    in_dim: usize,
    out_dim: usize,
    activation: Activation,
    /// Row-major, `out_dim * in_dim` entries.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct NetworkDto {
    format_version: u32,
    layers: Vec<LayerDto>,
}

pub fn to_json(net: &NetworkSpec) -> String {
    let dto = NetworkDto {
        format_version: FORMAT_VERSION,
        layers: net
            .layers()
            .iter()
            .map(|l| LayerDto {
                in_dim: l.in_dim(),
                out_dim: l.out_dim(),
                activation: l.activation,
                weights: l.weights.data().to_vec(),
                bias: l.bias.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dto).expect("network serialization cannot fail")
}

pub fn from_json(s: &str) -> Result<NetworkSpec> {
    let dto: NetworkDto =
        serde_json::from_str(s).map_err(|e| NnError::Format(format!("bad network json: {e}")))?;
    if dto.format_version != FORMAT_VERSION {
        return Err(NnError::Format(format!(
            "unsupported format_version {} (expected {FORMAT_VERSION})",
            dto.format_version
        )));
    }
    let mut layers = Vec::with_capacity(dto.layers.len());
    for (i, l) in dto.layers.into_iter().enumerate() {
        if l.weights.len() != l.in_dim * l.out_dim {
            return Err(NnError::Format(format!(
                "layer {i}: weight count {} != {}x{}",
                l.weights.len(),
                l.out_dim,
                l.in_dim
            )));
        }
        layers.push(DenseLayer::new(
            Matrix::from_vec(l.out_dim, l.in_dim, l.weights),
            l.bias,
            l.activation,
        )?);
    }
    NetworkSpec::new(layers)
}

pub fn save(net: &NetworkSpec, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(net))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<NetworkSpec> {
    let s = std::fs::read_to_string(path)?;
    from_json(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::train::{init_network, TrainConfig};

    #[test]
    fn roundtrip_is_bit_exact() {
        let net = init_network(&[3, 5, 4, 2], Activation::Tanh, 99).unwrap();
        let round = from_json(&to_json(&net)).unwrap();
        for (a, b) in net.layers().iter().zip(round.layers()) {
            assert_eq!(a.weights.data(), b.weights.data());
            assert_eq!(a.bias, b.bias);
            assert_eq!(a.activation, b.activation);
        }
        let _ = TrainConfig::default();
    }

    #[test]
    fn version_mismatch_rejected() {
        let net = init_network(&[2, 2], Activation::Tanh, 0).unwrap();
        let s = to_json(&net).replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(matches!(from_json(&s), Err(NnError::Format(_))));
    }

    #[test]
    fn malformed_json_rejected() {
        assert!(from_json("{not json").is_err());
    }
}
