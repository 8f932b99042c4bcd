//! End-to-end adversarial-detection harness.
//!
//! Wires the library crates into a reproducible pipeline: dataset ingestion
//! (CSV, IDX, or the synthetic two-moons testbed), SGD training, attack
//! generation, detection-network scoring, ROC/AUC evaluation, parameter
//! sweeps, and deterministic plot/CSV emission. One TOML config file drives
//! every stage; each stage writes a manifest with the config hash and seed.

pub mod config;
pub mod data;
pub mod error;
pub mod evalset;
pub mod manifest;
pub mod pipeline;
pub mod plots;
pub mod roc;
pub mod score;
pub mod sweep;

pub use config::RunConfig;
pub use data::{generate_moons, load_csv, load_idx, Dataset, Split};
pub use error::{CliError, Result};
pub use evalset::{build_eval_set, combine_eval_sets, EvalCounts, EvalItem, EvalSet};
pub use roc::{roc_and_auc, roc_from_records, threshold_at_fpr, RocCurve, RocPoint};
pub use score::{
    read_scores_csv, score_all, write_scores_csv, DetectionRecord, Statistic, Truth,
};
pub use sweep::{sweep, SweepCell, SweepGrids, SweepResult};
