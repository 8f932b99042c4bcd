//! Dataset ingestion: CSV and IDX files plus the built-in synthetic
//! two-moons testbed. Inputs are normalized to `[0, 1]` and split
//! deterministically by a seeded shuffle.

use std::io::Read;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Val,
    Test,
}

/// Labeled inputs with split tags.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub splits: Vec<Split>,
    pub classes: usize,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Result<Self> {
        if inputs.is_empty() {
            return Err(CliError::Data("dataset is empty".into()));
        }
        if inputs.len() != labels.len() {
            return Err(CliError::Data(format!(
                "{} inputs but {} labels",
                inputs.len(),
                labels.len()
            )));
        }
        let dim = inputs[0].len();
        if dim == 0 {
            return Err(CliError::Data("zero-dimensional inputs".into()));
        }
        for (i, x) in inputs.iter().enumerate() {
            if x.len() != dim {
                return Err(CliError::Data(format!(
                    "row {i} has {} values, expected {dim}",
                    x.len()
                )));
            }
            if x.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
                return Err(CliError::Data(format!(
                    "row {i} has values outside [0, 1]"
                )));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(CliError::Data(format!(
                "label {bad} out of range for {classes} classes"
            )));
        }
        let n = inputs.len();
        Ok(Self {
            inputs,
            labels,
            splits: vec![Split::Train; n],
            classes,
        })
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Deterministic split assignment by seeded shuffle.
    pub fn assign_splits(&mut self, train_frac: f64, val_frac: f64, seed: u64) -> Result<()> {
        if !(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac < 1.0) {
            return Err(CliError::Config(format!(
                "bad split fractions train={train_frac} val={val_frac}"
            )));
        }
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        let n_train = ((n as f64) * train_frac).round() as usize;
        let n_val = ((n as f64) * val_frac).round() as usize;
        for (rank, &idx) in order.iter().enumerate() {
            self.splits[idx] = if rank < n_train {
                Split::Train
            } else if rank < n_train + n_val {
                Split::Val
            } else {
                Split::Test
            };
        }
        Ok(())
    }

    pub fn indices_of(&self, split: Split) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.splits[i] == split).collect()
    }

    /// Owned copies of one split's inputs and labels.
    pub fn subset(&self, split: Split) -> (Vec<Vec<f64>>, Vec<usize>) {
        let idx = self.indices_of(split);
        (
            idx.iter().map(|&i| self.inputs[i].clone()).collect(),
            idx.iter().map(|&i| self.labels[i]).collect(),
        )
    }
}

/// Standard normal via Box-Muller.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Two interleaved half-circles with Gaussian noise, mapped into `[0,1]^2`
/// by a fixed affine transform. The map spreads the moons across most of the
/// box and saturates at the edges, like any bounded-feature dataset.
pub fn generate_moons(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(CliError::Config("need at least 4 samples".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let t = std::f64::consts::PI * rng.random::<f64>();
        let (mut x, mut y) = if class == 0 {
            (t.cos(), t.sin())
        } else {
            (1.0 - t.cos(), 0.5 - t.sin())
        };
        x += noise * standard_normal(&mut rng);
        y += noise * standard_normal(&mut rng);
        let u = ((x + 1.25) / 2.2).clamp(0.0, 1.0);
        let v = ((y + 1.25) / 2.2).clamp(0.0, 1.0);
        inputs.push(vec![u, v]);
        labels.push(class);
    }
    Dataset::new(inputs, labels, 2)
}

/// CSV rows `label,v1,v2,...` with feature values already in `[0, 1]`.
pub fn load_csv(path: &Path) -> Result<Dataset> {
    let raw = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());
    let mut inputs = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("csv row {row}: {e}")))?;
        if record.len() < 2 {
            return Err(CliError::Data(format!(
                "csv row {row}: need a label and at least one feature"
            )));
        }
        let label: usize = record[0]
            .parse()
            .map_err(|_| CliError::Data(format!("csv row {row}: bad label {:?}", &record[0])))?;
        let mut x = Vec::with_capacity(record.len() - 1);
        for field in record.iter().skip(1) {
            let v: f64 = field
                .parse()
                .map_err(|_| CliError::Data(format!("csv row {row}: bad value {field:?}")))?;
            x.push(v);
        }
        labels.push(label);
        inputs.push(x);
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(inputs, labels, classes.max(2))
}

const IDX_IMAGES_MAGIC: u32 = 2051;
const IDX_LABELS_MAGIC: u32 = 2049;

fn read_u32_be(r: &mut impl Read, what: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|e| CliError::Data(format!("idx: short read for {what}: {e}")))?;
    Ok(u32::from_be_bytes(buf))
}

/// IDX ubyte pair (big-endian magic + dims, byte pixels). Pixels are mapped
/// affinely: byte 0 -> 0.0, byte 255 -> 1.0.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let img_bytes = std::fs::read(images_path).map_err(CliError::io(images_path))?;
    let lbl_bytes = std::fs::read(labels_path).map_err(CliError::io(labels_path))?;

    let mut r = img_bytes.as_slice();
    let magic = read_u32_be(&mut r, "image magic")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(CliError::Data(format!(
            "idx image magic {magic}, expected {IDX_IMAGES_MAGIC}"
        )));
    }
    let n = read_u32_be(&mut r, "image count")? as usize;
    let rows = read_u32_be(&mut r, "rows")? as usize;
    let cols = read_u32_be(&mut r, "cols")? as usize;
    let dim = rows * cols;
    let mut pixels = vec![0u8; n * dim];
    r.read_exact(&mut pixels)
        .map_err(|e| CliError::Data(format!("idx: truncated image data: {e}")))?;

    let mut r = lbl_bytes.as_slice();
    let magic = read_u32_be(&mut r, "label magic")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(CliError::Data(format!(
            "idx label magic {magic}, expected {IDX_LABELS_MAGIC}"
        )));
    }
    let n_labels = read_u32_be(&mut r, "label count")? as usize;
    if n_labels != n {
        return Err(CliError::Data(format!(
            "idx: {n} images but {n_labels} labels"
        )));
    }
    let mut raw_labels = vec![0u8; n];
    r.read_exact(&mut raw_labels)
        .map_err(|e| CliError::Data(format!("idx: truncated label data: {e}")))?;

    let inputs: Vec<Vec<f64>> = pixels
        .chunks_exact(dim)
        .map(|chunk| chunk.iter().map(|&b| b as f64 / 255.0).collect())
        .collect();
    let labels: Vec<usize> = raw_labels.iter().map(|&b| b as usize).collect();
    let classes = labels.iter().max().map_or(0, |m| m + 1).max(2);
    Dataset::new(inputs, labels, classes)
}
