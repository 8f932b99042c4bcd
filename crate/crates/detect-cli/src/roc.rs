//! ROC assembly and area under the curve.
//!
//! The curve sweeps the decision threshold over every distinct score (with
//! the `score > τ` detection rule), so ties are handled exactly and the
//! trapezoid AUC coincides with the Mann-Whitney rank-sum statistic.

use crate::error::{CliError, Result};
use crate::score::{DetectionRecord, Statistic, Truth};

#[derive(Debug, Clone, Copy)]
pub struct RocPoint {
    pub tau: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone)]
pub struct RocCurve {
    /// Points in increasing-τ order: (1,1) at τ=-∞ down to (0,0) at τ=+∞.
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Builds the ROC curve and trapezoid AUC from adversarial (positive) and
/// clean (negative) score samples.
pub fn roc_and_auc(adversarial: &[f64], clean: &[f64]) -> Result<RocCurve> {
    if adversarial.is_empty() || clean.is_empty() {
        return Err(CliError::Data(
            "ROC needs both adversarial and clean scores".into(),
        ));
    }
    if adversarial.iter().chain(clean).any(|v| v.is_nan()) {
        return Err(CliError::Numeric("NaN score in ROC input".into()));
    }

    let mut taus: Vec<f64> = adversarial.iter().chain(clean).cloned().collect();
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    taus.dedup();

    let n_pos = adversarial.len() as f64;
    let n_neg = clean.len() as f64;
    let rates = |tau: f64| -> (f64, f64) {
        let tp = adversarial.iter().filter(|&&s| s > tau).count() as f64;
        let fp = clean.iter().filter(|&&s| s > tau).count() as f64;
        (fp / n_neg, tp / n_pos)
    };

    let mut points = Vec::with_capacity(taus.len() + 2);
    points.push(RocPoint {
        tau: f64::NEG_INFINITY,
        fpr: 1.0,
        tpr: 1.0,
    });
    for &tau in &taus {
        let (fpr, tpr) = rates(tau);
        points.push(RocPoint { tau, fpr, tpr });
    }
    points.push(RocPoint {
        tau: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    });

    // Trapezoid rule over the curve traversed from (0,0) to (1,1).
    let mut auc = 0.0;
    for pair in points.windows(2) {
        let (right, left) = (&pair[0], &pair[1]);
        auc += (right.fpr - left.fpr) * (right.tpr + left.tpr) / 2.0;
    }
    Ok(RocCurve { points, auc })
}

/// Assembles the curve from detection records using the selected statistic.
pub fn roc_from_records(records: &[DetectionRecord], statistic: Statistic) -> Result<RocCurve> {
    let adversarial: Vec<f64> = records
        .iter()
        .filter(|r| r.truth == Truth::Adversarial)
        .map(|r| r.score(statistic))
        .collect();
    let clean: Vec<f64> = records
        .iter()
        .filter(|r| r.truth == Truth::Clean)
        .map(|r| r.score(statistic))
        .collect();
    roc_and_auc(&adversarial, &clean)
}

/// Smallest threshold whose false-positive rate does not exceed `target`,
/// chosen on the given (typically validation) curve. A convenience for
/// operating-point selection; detection quality is always reported as the
/// full ROC sweep.
pub fn threshold_at_fpr(curve: &RocCurve, target: f64) -> f64 {
    for p in &curve.points {
        if p.fpr <= target {
            return p.tau;
        }
    }
    f64::INFINITY
}

/// `roc.csv` emission: `tau,fpr,tpr` rows in increasing-τ order.
pub fn write_roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("tau,fpr,tpr\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.tau, p.fpr, p.tpr));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfectly_separated_scores_give_auc_one() {
        let curve = roc_and_auc(&[2.0, 3.0, 4.0], &[0.0, 0.5, 1.0]).unwrap();
        assert!((curve.auc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_distributions_give_half_with_ties() {
        let curve = roc_and_auc(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((curve.auc - 0.5).abs() < 1e-12);
        // All-constant scores degenerate to the chance diagonal too.
        let curve = roc_and_auc(&[0.7, 0.7], &[0.7, 0.7, 0.7]).unwrap();
        assert!((curve.auc - 0.5).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_monotonicity() {
        let curve = roc_and_auc(&[0.9, 0.4, 0.8], &[0.1, 0.45, 0.2]).unwrap();
        let first = curve.points.first().unwrap();
        assert_eq!((first.fpr, first.tpr), (1.0, 1.0));
        assert!(first.tau == f64::NEG_INFINITY);
        let last = curve.points.last().unwrap();
        assert_eq!((last.fpr, last.tpr), (0.0, 0.0));
        assert!(last.tau == f64::INFINITY);
        for pair in curve.points.windows(2) {
            assert!(pair[1].fpr <= pair[0].fpr);
            assert!(pair[1].tpr <= pair[0].tpr);
            assert!(pair[1].tau >= pair[0].tau);
        }
    }

    #[test]
    fn single_class_rejected() {
        assert!(roc_and_auc(&[1.0], &[]).is_err());
        assert!(roc_and_auc(&[], &[1.0]).is_err());
    }

    #[test]
    fn nan_scores_rejected() {
        assert!(matches!(
            roc_and_auc(&[f64::NAN], &[0.0]),
            Err(CliError::Numeric(_))
        ));
    }

    #[test]
    fn threshold_at_fpr_picks_first_admissible_tau() {
        let curve = roc_and_auc(&[0.9, 0.8], &[0.1, 0.2, 0.3]).unwrap();
        let tau = threshold_at_fpr(&curve, 0.0);
        // Scores above 0.3 are all adversarial here.
        assert!((0.3..0.8).contains(&tau));
        let anything = threshold_at_fpr(&curve, 1.0);
        assert_eq!(anything, f64::NEG_INFINITY);
    }

    #[test]
    fn roc_csv_includes_every_point() {
        let curve = roc_and_auc(&[0.9], &[0.1]).unwrap();
        let csv = write_roc_csv(&curve);
        assert_eq!(csv.lines().count(), 1 + curve.points.len());
        assert!(csv.starts_with("tau,fpr,tpr\n-inf,1,1\n"));
    }
}
