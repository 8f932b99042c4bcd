//! The detection population: test inputs that the full network classifies
//! correctly when clean AND misclassifies after the attack.

use attacks::AdversarialPair;
use nn_core::NetworkSpec;

use crate::error::Result;

/// One clean/adversarial pair admitted to the evaluation.
#[derive(Debug, Clone)]
pub struct EvalItem {
    /// Index of the originating test-split input.
    pub id: usize,
    pub clean: Vec<f64>,
    pub adversarial: Vec<f64>,
    pub label: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalCounts {
    pub total: usize,
    pub correct_clean: usize,
    pub flipped_after_attack: usize,
    pub selected: usize,
}

#[derive(Debug, Clone, Default)]
pub struct EvalSet {
    pub items: Vec<EvalItem>,
    pub counts: EvalCounts,
}

impl EvalSet {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }
}

/// Filters the attacked test set down to the double condition, re-checking
/// both predictions against the full network.
pub fn build_eval_set(net: &NetworkSpec, pairs: &[AdversarialPair]) -> Result<EvalSet> {
    let mut items = Vec::new();
    let mut counts = EvalCounts {
        total: pairs.len(),
        ..Default::default()
    };
    for (id, pair) in pairs.iter().enumerate() {
        let clean_pred = net.predict(&pair.clean).map_err(crate::error::CliError::from)?;
        let adv_pred = net
            .predict(&pair.adversarial)
            .map_err(crate::error::CliError::from)?;
        let correct = clean_pred == pair.label;
        let flipped = adv_pred != pair.label;
        if correct {
            counts.correct_clean += 1;
        }
        if flipped {
            counts.flipped_after_attack += 1;
        }
        if correct && flipped {
            counts.selected += 1;
            items.push(EvalItem {
                id,
                clean: pair.clean.clone(),
                adversarial: pair.adversarial.clone(),
                label: pair.label,
            });
        }
    }
    Ok(EvalSet { items, counts })
}

/// Union of several attacks' eval sets: every adversarial instance is kept,
/// clean originals are deduplicated by test-input id.
pub fn combine_eval_sets(sets: &[EvalSet]) -> EvalSet {
    let mut seen_clean = std::collections::HashSet::new();
    let mut items = Vec::new();
    let mut counts = EvalCounts::default();
    for set in sets {
        counts.total += set.counts.total;
        counts.correct_clean += set.counts.correct_clean;
        counts.flipped_after_attack += set.counts.flipped_after_attack;
        for item in &set.items {
            let first_occurrence = seen_clean.insert(item.id);
            items.push(EvalItem {
                id: item.id,
                clean: if first_occurrence {
                    item.clean.clone()
                } else {
                    Vec::new() // duplicate clean side dropped below
                },
                adversarial: item.adversarial.clone(),
                label: item.label,
            });
        }
    }
    counts.selected = items.len();
    EvalSet { items, counts }
}
