//! Run configuration: one TOML file with `[run]`, `[data]`, `[network]`,
//! `[attack.*]`, `[detect]` and `[sweep]` sections drives every subcommand.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stochastic_inference::{MaskMode, Method, SamplingConfig};

use crate::error::{CliError, Result};
use crate::score::Statistic;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSection {
    pub seed: u64,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum DataSection {
    /// Built-in synthetic two-moons testbed.
    Moons {
        n: usize,
        noise: f64,
        #[serde(default = "default_train_frac")]
        train_frac: f64,
        #[serde(default = "default_val_frac")]
        val_frac: f64,
    },
    /// `label,v1,v2,...` rows with values in [0, 1].
    Csv {
        path: PathBuf,
        #[serde(default = "default_train_frac")]
        train_frac: f64,
        #[serde(default = "default_val_frac")]
        val_frac: f64,
    },
    /// IDX ubyte image/label pair.
    Idx {
        images: PathBuf,
        labels: PathBuf,
        #[serde(default = "default_train_frac")]
        train_frac: f64,
        #[serde(default = "default_val_frac")]
        val_frac: f64,
        /// Optional cap on the number of samples (subset experiments).
        #[serde(default)]
        limit: Option<usize>,
    },
}

fn default_train_frac() -> f64 {
    0.7
}

fn default_val_frac() -> f64 {
    0.15
}

impl DataSection {
    pub fn fractions(&self) -> (f64, f64) {
        match self {
            DataSection::Moons {
                train_frac,
                val_frac,
                ..
            }
            | DataSection::Csv {
                train_frac,
                val_frac,
                ..
            }
            | DataSection::Idx {
                train_frac,
                val_frac,
                ..
            } => (*train_frac, *val_frac),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSection {
    pub hidden: Vec<usize>,
    #[serde(default = "default_activation")]
    pub activation: String,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
}

fn default_activation() -> String {
    "tanh".into()
}

fn default_lr() -> f64 {
    0.1
}

fn default_epochs() -> usize {
    100
}

fn default_batch() -> usize {
    32
}

impl NetworkSection {
    pub fn activation(&self) -> Result<nn_core::Activation> {
        match self.activation.as_str() {
            "tanh" => Ok(nn_core::Activation::Tanh),
            "relu" => Ok(nn_core::Activation::Relu),
            "identity" => Ok(nn_core::Activation::Identity),
            other => Err(CliError::Config(format!(
                "unknown hidden activation {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackSection {
    pub kind: String,
    pub epsilon: f64,
    /// Per-step size; defaults to `epsilon / iters`.
    #[serde(default)]
    pub eps_iter: Option<f64>,
    /// Defaults to 1 for fgsm, 20 for bim/mim.
    #[serde(default)]
    pub iters: Option<usize>,
    #[serde(default = "default_decay")]
    pub decay: f64,
}

fn default_decay() -> f64 {
    1.0
}

impl AttackSection {
    pub fn to_attack_config(&self) -> Result<attacks::AttackConfig> {
        let kind = match self.kind.as_str() {
            "fgsm" => attacks::AttackKind::Fgsm,
            "bim" => attacks::AttackKind::Bim,
            "mim" => attacks::AttackKind::Mim,
            other => return Err(CliError::Config(format!("unknown attack kind {other:?}"))),
        };
        let iters = self.iters.unwrap_or(match kind {
            attacks::AttackKind::Fgsm => 1,
            _ => 20,
        });
        let eps_iter = match kind {
            attacks::AttackKind::Fgsm => self.epsilon,
            _ => self
                .eps_iter
                .unwrap_or(self.epsilon / iters.max(1) as f64),
        };
        let cfg = attacks::AttackConfig {
            kind,
            epsilon: self.epsilon,
            eps_iter,
            iters,
            decay: self.decay,
            box_lo: 0.0,
            box_hi: 1.0,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectSection {
    pub method: Method,
    pub block: usize,
    #[serde(default)]
    pub f: Option<f64>,
    #[serde(default)]
    pub dropout_keep: Option<f64>,
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default)]
    pub mask_mode: MaskMode,
    #[serde(default)]
    pub statistic: Statistic,
    /// Which attack's eval set to score; "combination" unions all of them.
    pub attack: String,
}

fn default_r() -> usize {
    20
}

impl DetectSection {
    pub fn sampling_config(&self, seed: u64) -> SamplingConfig {
        SamplingConfig {
            method: self.method,
            block: self.block,
            f: self.f,
            dropout_keep: self.dropout_keep,
            r: self.r,
            mask_mode: self.mask_mode,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    pub methods: Vec<Method>,
    pub blocks: Vec<usize>,
    #[serde(default)]
    pub f_grid: Vec<f64>,
    #[serde(default)]
    pub dropout_grid: Vec<f64>,
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default)]
    pub mask_mode: MaskMode,
    #[serde(default)]
    pub statistic: Statistic,
    /// Attack names to sweep against; "combination" unions all attacks.
    pub attacks: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub run: RunSection,
    pub data: DataSection,
    pub network: NetworkSection,
    #[serde(default)]
    pub attack: BTreeMap<String, AttackSection>,
    #[serde(default)]
    pub detect: Option<DetectSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Ok((Self::parse(&text)?, text))
    }
}
