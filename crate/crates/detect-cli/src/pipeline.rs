//! Stage functions behind the CLI subcommands. Each stage reads its inputs
//! from the run directory, writes its outputs there, and records a manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use attacks::AdversarialPair;
use nn_core::{accuracy, train_sgd, NetworkSpec, TrainConfig};
use serde::Serialize;
use stochastic_inference::build_plan;

use crate::config::{DataSection, RunConfig};
use crate::data::{generate_moons, load_csv, load_idx, Dataset, Split};
use crate::error::{CliError, Result};
use crate::evalset::{build_eval_set, combine_eval_sets, EvalSet};
use crate::manifest::write_manifest;
use crate::plots::emit_plots;
use crate::roc::{roc_from_records, threshold_at_fpr, write_roc_csv, RocCurve};
use crate::score::{read_scores_csv, score_all, write_scores_csv};
use crate::sweep::{sweep, SweepGrids, SweepResult};

pub const NETWORK_FILE: &str = "network.json";
pub const SCORES_FILE: &str = "scores.csv";
pub const COMBINATION: &str = "combination";

pub fn load_data(cfg: &RunConfig) -> Result<Dataset> {
    let mut dataset = match &cfg.data {
        DataSection::Moons { n, noise, .. } => generate_moons(*n, *noise, cfg.run.seed)?,
        DataSection::Csv { path, .. } => load_csv(path)?,
        DataSection::Idx {
            images,
            labels,
            limit,
            ..
        } => {
            let mut ds = load_idx(images, labels)?;
            if let Some(limit) = limit {
                ds.inputs.truncate(*limit);
                ds.labels.truncate(*limit);
                ds.splits.truncate(*limit);
                if ds.is_empty() {
                    return Err(CliError::Data("limit truncated dataset to zero".into()));
                }
            }
            ds
        }
    };
    let (train_frac, val_frac) = cfg.data.fractions();
    dataset.assign_splits(train_frac, val_frac, cfg.run.seed)?;
    Ok(dataset)
}

/// Trains the classifier on the train split and saves `network.json`.
pub fn stage_train(cfg: &RunConfig, config_text: &str) -> Result<NetworkSpec> {
    let out_dir = &cfg.run.out_dir;
    std::fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    let dataset = load_data(cfg)?;
    let (train_x, train_y) = dataset.subset(Split::Train);
    let mut arch = vec![dataset.dim()];
    arch.extend_from_slice(&cfg.network.hidden);
    arch.push(dataset.classes);
    let train_cfg = TrainConfig {
        learning_rate: cfg.network.learning_rate,
        epochs: cfg.network.epochs,
        batch_size: cfg.network.batch_size,
        seed: cfg.run.seed,
    };
    let net = train_sgd(
        &train_x,
        &train_y,
        &arch,
        cfg.network.activation()?,
        &train_cfg,
    )?;

    let (test_x, test_y) = dataset.subset(Split::Test);
    let train_acc = accuracy(&net, &train_x, &train_y)?;
    let test_acc = accuracy(&net, &test_x, &test_y)?;
    println!("train accuracy {train_acc:.4}, test accuracy {test_acc:.4}");

    let path = out_dir.join(NETWORK_FILE);
    nn_core::serialize::save(&net, &path).map_err(CliError::from)?;
    write_manifest(
        out_dir,
        "train",
        config_text,
        cfg.run.seed,
        &[NETWORK_FILE.into()],
    )?;
    Ok(net)
}

pub fn load_network(out_dir: &Path) -> Result<NetworkSpec> {
    let path = out_dir.join(NETWORK_FILE);
    nn_core::serialize::load(&path).map_err(|e| match e {
        nn_core::NnError::Io(source) => CliError::Io { path, source },
        other => CliError::Data(other.to_string()),
    })
}

/// Serialized adversarial set: one CSV row per test input,
/// `id,label,clean...,adv...`, plus a small JSON manifest.
#[derive(Debug, Serialize)]
struct AttackManifest {
    name: String,
    kind: String,
    epsilon: f64,
    eps_iter: f64,
    iters: usize,
    decay: f64,
    total: usize,
    flipped: usize,
    clean_accuracy: f64,
    adversarial_accuracy: f64,
}

pub fn write_attack_csv(pairs: &[AdversarialPair]) -> String {
    let mut out = String::from("id,label,dim,values\n");
    for (id, p) in pairs.iter().enumerate() {
        let mut fields = vec![
            id.to_string(),
            p.label.to_string(),
            p.clean.len().to_string(),
        ];
        fields.extend(p.clean.iter().map(|v| v.to_string()));
        fields.extend(p.adversarial.iter().map(|v| v.to_string()));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn read_attack_csv(text: &str, net: &NetworkSpec) -> Result<Vec<AdversarialPair>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(CliError::Data(format!("attack csv row {i}: too short")));
        }
        let label: usize = fields[1]
            .parse()
            .map_err(|_| CliError::Data(format!("attack csv row {i}: bad label")))?;
        let dim: usize = fields[2]
            .parse()
            .map_err(|_| CliError::Data(format!("attack csv row {i}: bad dim")))?;
        if fields.len() != 3 + 2 * dim {
            return Err(CliError::Data(format!(
                "attack csv row {i}: expected {} fields, got {}",
                3 + 2 * dim,
                fields.len()
            )));
        }
        let parse = |s: &&str| -> Result<f64> {
            s.parse()
                .map_err(|_| CliError::Data(format!("attack csv row {i}: bad value {s:?}")))
        };
        let clean: Vec<f64> = fields[3..3 + dim].iter().map(parse).collect::<Result<_>>()?;
        let adversarial: Vec<f64> = fields[3 + dim..].iter().map(parse).collect::<Result<_>>()?;
        let clean_prediction = net.predict(&clean)?;
        let adversarial_prediction = net.predict(&adversarial)?;
        pairs.push(AdversarialPair {
            clean,
            adversarial,
            label,
            clean_prediction,
            adversarial_prediction,
        });
    }
    Ok(pairs)
}

/// Crafts every configured attack against the test split and serializes the
/// clean/adv/label triplets under `attacks/`.
pub fn stage_attack(
    cfg: &RunConfig,
    config_text: &str,
) -> Result<BTreeMap<String, Vec<AdversarialPair>>> {
    let out_dir = &cfg.run.out_dir;
    let net = load_network(out_dir)?;
    let dataset = load_data(cfg)?;
    let (test_x, test_y) = dataset.subset(Split::Test);
    if cfg.attack.is_empty() {
        return Err(CliError::Config("no [attack.*] sections configured".into()));
    }

    let attack_dir = out_dir.join("attacks");
    std::fs::create_dir_all(&attack_dir).map_err(CliError::io(&attack_dir))?;
    let mut all = BTreeMap::new();
    let mut outputs = Vec::new();
    for (name, section) in &cfg.attack {
        let attack_cfg = section.to_attack_config()?;
        let mut pairs = Vec::with_capacity(test_x.len());
        for (x, &y) in test_x.iter().zip(&test_y) {
            pairs.push(attacks::craft(&net, x, y, &attack_cfg)?);
        }
        let clean_acc = pairs
            .iter()
            .filter(|p| p.clean_prediction == p.label)
            .count() as f64
            / pairs.len() as f64;
        let adv_acc = pairs
            .iter()
            .filter(|p| p.adversarial_prediction == p.label)
            .count() as f64
            / pairs.len() as f64;
        println!(
            "attack {name}: clean accuracy {clean_acc:.4} -> adversarial accuracy {adv_acc:.4}"
        );

        let csv_path = attack_dir.join(format!("{name}.csv"));
        std::fs::write(&csv_path, write_attack_csv(&pairs)).map_err(CliError::io(&csv_path))?;
        let manifest = AttackManifest {
            name: name.clone(),
            kind: section.kind.clone(),
            epsilon: attack_cfg.epsilon,
            eps_iter: attack_cfg.eps_iter,
            iters: attack_cfg.iters,
            decay: attack_cfg.decay,
            total: pairs.len(),
            flipped: pairs.iter().filter(|p| p.flipped()).count(),
            clean_accuracy: clean_acc,
            adversarial_accuracy: adv_acc,
        };
        let man_path = attack_dir.join(format!("{name}.json"));
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Data(format!("attack manifest encode: {e}")))?;
        std::fs::write(&man_path, text).map_err(CliError::io(&man_path))?;
        outputs.push(format!("attacks/{name}.csv"));
        all.insert(name.clone(), pairs);
    }
    write_manifest(out_dir, "attack", config_text, cfg.run.seed, &outputs)?;
    Ok(all)
}

fn load_attack_pairs(out_dir: &Path, name: &str, net: &NetworkSpec) -> Result<Vec<AdversarialPair>> {
    let path = out_dir.join("attacks").join(format!("{name}.csv"));
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    read_attack_csv(&text, net)
}

/// Eval set for one attack name, or the union over all configured attacks
/// for [`COMBINATION`].
pub fn eval_set_for(
    cfg: &RunConfig,
    out_dir: &Path,
    net: &NetworkSpec,
    attack_name: &str,
) -> Result<EvalSet> {
    let eval = if attack_name == COMBINATION {
        let mut sets = Vec::new();
        for name in cfg.attack.keys() {
            let pairs = load_attack_pairs(out_dir, name, net)?;
            sets.push(build_eval_set(net, &pairs)?);
        }
        if sets.is_empty() {
            return Err(CliError::Config(
                "combination requested but no attacks configured".into(),
            ));
        }
        combine_eval_sets(&sets)
    } else {
        if !cfg.attack.contains_key(attack_name) {
            return Err(CliError::Config(format!(
                "attack {attack_name:?} not configured"
            )));
        }
        let pairs = load_attack_pairs(out_dir, attack_name, net)?;
        build_eval_set(net, &pairs)?
    };
    if eval.is_empty() {
        return Err(CliError::Data(format!(
            "eval set for {attack_name:?} is empty: nothing was correctly classified and then flipped"
        )));
    }
    Ok(eval)
}

/// Scores the configured detection setup on its attack's eval set and writes
/// `scores.csv`.
pub fn stage_score(cfg: &RunConfig, config_text: &str) -> Result<PathBuf> {
    let out_dir = &cfg.run.out_dir;
    let detect = cfg
        .detect
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [detect] section".into()))?;
    let net = load_network(out_dir)?;
    let eval = eval_set_for(cfg, out_dir, &net, &detect.attack)?;
    println!(
        "eval set {}: {} of {} attacked inputs selected",
        detect.attack, eval.counts.selected, eval.counts.total
    );
    let records = score_all(&net, &eval, &detect.sampling_config(cfg.run.seed))?;
    let path = out_dir.join(SCORES_FILE);
    std::fs::write(&path, write_scores_csv(&records)).map_err(CliError::io(&path))?;
    write_manifest(
        out_dir,
        "score",
        config_text,
        cfg.run.seed,
        &[SCORES_FILE.into()],
    )?;
    Ok(path)
}

/// Reads `scores.csv` back and emits `roc.csv`, `auc.csv` and the ROC plot.
pub fn stage_roc(cfg: &RunConfig, config_text: &str) -> Result<RocCurve> {
    let out_dir = &cfg.run.out_dir;
    let detect = cfg
        .detect
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [detect] section".into()))?;
    let scores_path = out_dir.join(SCORES_FILE);
    let text = std::fs::read_to_string(&scores_path).map_err(CliError::io(&scores_path))?;
    let records = read_scores_csv(&text)?;
    let curve = roc_from_records(&records, detect.statistic)?;

    let roc_path = out_dir.join("roc.csv");
    std::fs::write(&roc_path, write_roc_csv(&curve)).map_err(CliError::io(&roc_path))?;
    let auc_path = out_dir.join("auc.csv");
    std::fs::write(&auc_path, format!("statistic,auc\n{:?},{}\n", detect.statistic, curve.auc))
        .map_err(CliError::io(&auc_path))?;
    emit_plots(&[(detect.attack.clone(), curve.clone())], None, out_dir)?;

    let tau_at_5pct = threshold_at_fpr(&curve, 0.05);
    println!(
        "AUC {:.4}; threshold at 5% FPR: {tau_at_5pct}",
        curve.auc
    );
    write_manifest(
        out_dir,
        "roc",
        config_text,
        cfg.run.seed,
        &["roc.csv".into(), "auc.csv".into()],
    )?;
    Ok(curve)
}

/// Full cartesian sweep; writes `sweep.csv`, the bar plot, and a best-cell
/// summary.
pub fn stage_sweep(cfg: &RunConfig, config_text: &str) -> Result<SweepResult> {
    let out_dir = &cfg.run.out_dir;
    let section = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [sweep] section".into()))?;
    let net = load_network(out_dir)?;

    let mut eval_sets = Vec::new();
    for name in &section.attacks {
        eval_sets.push((name.clone(), eval_set_for(cfg, out_dir, &net, name)?));
    }
    let grids = SweepGrids {
        methods: section.methods.clone(),
        blocks: section.blocks.clone(),
        f_grid: section.f_grid.clone(),
        dropout_grid: section.dropout_grid.clone(),
        r: section.r,
        mask_mode: section.mask_mode,
        statistic: section.statistic,
    };
    let result = sweep(&net, &eval_sets, &grids, cfg.run.seed)?;

    for (attack, _) in &eval_sets {
        for &method in &grids.methods {
            if let Some(best) = result.best_for(attack, method) {
                println!(
                    "{attack}/{method}: best AUC {:.4} at block {} param {}",
                    best.auc.unwrap(),
                    best.block,
                    best.param
                );
            }
        }
    }
    let failures = result.cells.iter().filter(|c| c.error.is_some()).count();
    if failures > 0 {
        println!("{failures} sweep cells failed; see sweep.csv");
    }
    emit_plots(&[], Some(&result), out_dir)?;
    write_manifest(
        out_dir,
        "sweep",
        config_text,
        cfg.run.seed,
        &["sweep.csv".into(), "sweep.svg".into()],
    )?;
    Ok(result)
}

/// Dumps the sampling plan of one test input as JSON.
pub fn stage_plan(cfg: &RunConfig, config_text: &str, input_index: usize) -> Result<PathBuf> {
    let out_dir = &cfg.run.out_dir;
    let detect = cfg
        .detect
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [detect] section".into()))?;
    let net = load_network(out_dir)?;
    let dataset = load_data(cfg)?;
    let (test_x, _) = dataset.subset(Split::Test);
    let x = test_x.get(input_index).ok_or_else(|| {
        CliError::Config(format!(
            "input index {input_index} out of range ({} test inputs)",
            test_x.len()
        ))
    })?;
    let sampling = detect.sampling_config(cfg.run.seed);
    if !sampling.method.is_fixed() {
        return Err(CliError::Config(
            "plan dump applies to fixed-probability methods".into(),
        ));
    }
    let trace = net.forward_full(x)?;
    let plan = build_plan(&trace, &sampling)?;

    #[derive(Serialize)]
    struct EntryDump {
        layer_index: usize,
        c: Option<f64>,
        p: Option<Vec<f64>>,
        pi: Vec<f64>,
    }
    #[derive(Serialize)]
    struct PlanDump {
        input_index: usize,
        method: String,
        entries: Vec<EntryDump>,
        skipped_units: Vec<usize>,
    }
    let dump = PlanDump {
        input_index,
        method: sampling.method.to_string(),
        entries: plan
            .entries
            .iter()
            .map(|e| {
                let (c, p) = match &e.kind {
                    stochastic_inference::PlanKind::VarianceMin { p, c } => {
                        (Some(*c), Some(p.as_slice().to_vec()))
                    }
                    stochastic_inference::PlanKind::Uniform { .. } => (None, None),
                };
                EntryDump {
                    layer_index: e.layer_index,
                    c,
                    p,
                    pi: e.pi.clone(),
                }
            })
            .collect(),
        skipped_units: plan.skipped_units.clone(),
    };
    let path = out_dir.join(format!("plan-{input_index}.json"));
    let text = serde_json::to_string_pretty(&dump)
        .map_err(|e| CliError::Data(format!("plan encode: {e}")))?;
    std::fs::write(&path, text).map_err(CliError::io(&path))?;
    write_manifest(
        out_dir,
        "plan",
        config_text,
        cfg.run.seed,
        &[format!("plan-{input_index}.json")],
    )?;
    Ok(path)
}
