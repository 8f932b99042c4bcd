//! Per-input detection scoring: run the detection network on every clean and
//! adversarial member of the eval set and record both uncertainty scores.

use rayon::prelude::*;
use stochastic_inference::{
    build_plan, mc_forward_dynamic, mc_forward_fixed, mix_seed, SamplingConfig,
};
use uncertainty_metrics::score_outputs;

use crate::error::{CliError, Result};
use crate::evalset::EvalSet;
use nn_core::NetworkSpec;

/// Ground-truth tag of a scored input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    Clean,
    Adversarial,
}

impl std::fmt::Display for Truth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Truth::Clean => write!(f, "clean"),
            Truth::Adversarial => write!(f, "adversarial"),
        }
    }
}

/// One scored input.
#[derive(Debug, Clone)]
pub struct DetectionRecord {
    pub input_id: usize,
    pub truth: Truth,
    pub mi: f64,
    pub var_trace: f64,
}

/// Which statistic drives thresholding and ROC assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    #[default]
    Mi,
    VarTrace,
}

impl DetectionRecord {
    pub fn score(&self, statistic: Statistic) -> f64 {
        match statistic {
            Statistic::Mi => self.mi,
            Statistic::VarTrace => self.var_trace,
        }
    }
}

fn score_one(
    net: &NetworkSpec,
    x: &[f64],
    cfg: &SamplingConfig,
    seed: u64,
) -> Result<(f64, f64)> {
    let batch = if cfg.method.is_fixed() {
        let trace = net.forward_full(x).map_err(CliError::from)?;
        let plan = build_plan(&trace, cfg)?;
        mc_forward_fixed(net, x, &plan, cfg.r, cfg.mask_mode, seed)?
    } else {
        let mut per_input = cfg.clone();
        per_input.seed = seed;
        mc_forward_dynamic(net, x, &per_input)?
    };
    let score = score_outputs(&batch.outputs)?;
    Ok((score.mi, score.var_trace))
}

/// Scores every clean and adversarial input of the eval set. Inputs are
/// processed with independent seed streams derived from `(cfg.seed, id,
/// truth)`, so results are reproducible and order-independent; items run in
/// parallel. Duplicate items with an empty clean side (combination sets)
/// contribute only their adversarial record.
pub fn score_all(
    net: &NetworkSpec,
    eval: &EvalSet,
    cfg: &SamplingConfig,
) -> Result<Vec<DetectionRecord>> {
    if eval.is_empty() {
        return Err(CliError::Data("evaluation set is empty".into()));
    }
    cfg.validate().map_err(CliError::from)?;
    let per_item: Vec<Vec<DetectionRecord>> = eval
        .items
        .par_iter()
        .map(|item| -> Result<Vec<DetectionRecord>> {
            let mut records = Vec::with_capacity(2);
            if !item.clean.is_empty() {
                let seed = mix_seed(cfg.seed, (item.id as u64) * 2);
                let (mi, var_trace) = score_one(net, &item.clean, cfg, seed)?;
                records.push(DetectionRecord {
                    input_id: item.id,
                    truth: Truth::Clean,
                    mi,
                    var_trace,
                });
            }
            let seed = mix_seed(cfg.seed, (item.id as u64) * 2 + 1);
            let (mi, var_trace) = score_one(net, &item.adversarial, cfg, seed)?;
            records.push(DetectionRecord {
                input_id: item.id,
                truth: Truth::Adversarial,
                mi,
                var_trace,
            });
            Ok(records)
        })
        .collect::<Result<_>>()?;
    Ok(per_item.into_iter().flatten().collect())
}

/// `scores.csv` emission: `input_id,truth,mi,var_trace` with shortest-f64
/// values (lossless re-ingestion).
pub fn write_scores_csv(records: &[DetectionRecord]) -> String {
    let mut out = String::from("input_id,truth,mi,var_trace\n");
    for r in records {
        out.push_str(&format!("{},{},{},{}\n", r.input_id, r.truth, r.mi, r.var_trace));
    }
    out
}

pub fn read_scores_csv(text: &str) -> Result<Vec<DetectionRecord>> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "input_id,truth,mi,var_trace" {
                return Err(CliError::Data(format!("bad scores header {line:?}")));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CliError::Data(format!("scores row {i}: bad field count")));
        }
        let truth = match fields[1] {
            "clean" => Truth::Clean,
            "adversarial" => Truth::Adversarial,
            other => return Err(CliError::Data(format!("scores row {i}: bad truth {other:?}"))),
        };
        records.push(DetectionRecord {
            input_id: fields[0]
                .parse()
                .map_err(|_| CliError::Data(format!("scores row {i}: bad id")))?,
            truth,
            mi: fields[2]
                .parse()
                .map_err(|_| CliError::Data(format!("scores row {i}: bad mi")))?,
            var_trace: fields[3]
                .parse()
                .map_err(|_| CliError::Data(format!("scores row {i}: bad var_trace")))?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_csv_roundtrip_is_lossless() {
        let records = vec![
            DetectionRecord {
                input_id: 3,
                truth: Truth::Clean,
                mi: 0.123_456_789_012_345_68,
                var_trace: 1e-17,
            },
            DetectionRecord {
                input_id: 4,
                truth: Truth::Adversarial,
                mi: 2.0 / 3.0,
                var_trace: 0.0,
            },
        ];
        let csv = write_scores_csv(&records);
        let back = read_scores_csv(&csv).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.input_id, b.input_id);
            assert_eq!(a.truth, b.truth);
            assert_eq!(a.mi.to_bits(), b.mi.to_bits());
            assert_eq!(a.var_trace.to_bits(), b.var_trace.to_bits());
        }
    }

    #[test]
    fn malformed_scores_rejected() {
        assert!(read_scores_csv("wrong,header\n").is_err());
        assert!(read_scores_csv("input_id,truth,mi,var_trace\n1,weird,0,0\n").is_err());
    }
}
