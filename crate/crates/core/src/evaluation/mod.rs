//! Confusion-matrix metrics with macro averaging, and the with/without
//! NE-tagging ablation protocol.

mod ablation;

pub use ablation::{
    run_ablation, AblationConfig, AblationError, AblationReport, AblationRow, ModelSpec,
};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Polarity;

/// Binary confusion matrix with Positive as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction/gold length mismatch: {predictions} vs {golds}")]
    LengthMismatch { predictions: usize, golds: usize },
    #[error("binary evaluation cannot accept a neutral label")]
    NonBinaryLabel,
}

impl ConfusionMatrix {
    pub fn from_pairs(
        predictions: &[Polarity],
        golds: &[Polarity],
    ) -> Result<ConfusionMatrix, EvalError> {
        if predictions.len() != golds.len() {
            return Err(EvalError::LengthMismatch {
                predictions: predictions.len(),
                golds: golds.len(),
            });
        }
        let mut m = ConfusionMatrix::default();
        for (&pred, &gold) in predictions.iter().zip(golds) {
            if pred == Polarity::Neutral || gold == Polarity::Neutral {
                return Err(EvalError::NonBinaryLabel);
            }
            match (gold, pred) {
                (Polarity::Positive, Polarity::Positive) => m.tp += 1,
                (Polarity::Positive, _) => m.fn_ += 1,
                (Polarity::Negative, Polarity::Negative) => m.tn += 1,
                (Polarity::Negative, _) => m.fp += 1,
                _ => unreachable!(),
            }
        }
        Ok(m)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Per-class and macro-averaged precision/recall/F1 plus accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub pos_precision: f64,
    pub pos_recall: f64,
    pub pos_f1: f64,
    pub neg_precision: f64,
    pub neg_recall: f64,
    pub neg_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub n_evaluated: usize,
}

fn ratio(num: usize, denom: usize) -> f64 {
    if denom == 0 {
        0.0
    } else {
        num as f64 / denom as f64
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl MetricsReport {
    pub fn from_confusion(m: &ConfusionMatrix) -> MetricsReport {
        let pos_precision = ratio(m.tp, m.tp + m.fp);
        let pos_recall = ratio(m.tp, m.tp + m.fn_);
        let neg_precision = ratio(m.tn, m.tn + m.fn_);
        let neg_recall = ratio(m.tn, m.tn + m.fp);
        let pos_f1 = f1(pos_precision, pos_recall);
        let neg_f1 = f1(neg_precision, neg_recall);
        MetricsReport {
            pos_precision,
            pos_recall,
            pos_f1,
            neg_precision,
            neg_recall,
            neg_f1,
            macro_precision: (pos_precision + neg_precision) / 2.0,
            macro_recall: (pos_recall + neg_recall) / 2.0,
            macro_f1: (pos_f1 + neg_f1) / 2.0,
            accuracy: ratio(m.tp + m.tn, m.total()),
            n_evaluated: m.total(),
        }
    }
}

/// Macro-averaged metrics over prediction/gold pairs. Both sides must
/// be strictly binary.
pub fn evaluate(predictions: &[Polarity], golds: &[Polarity]) -> Result<MetricsReport, EvalError> {
    Ok(MetricsReport::from_confusion(&ConfusionMatrix::from_pairs(
        predictions,
        golds,
    )?))
}

/// Rounds a fraction to a percentage with one decimal, half-up, for the
/// plain-text tables. JSON reports keep full precision.
pub fn percent(value: f64) -> f64 {
    (value * 1000.0).round() / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use Polarity::{Negative as N, Positive as P};

    #[test]
    fn perfect_predictions() {
        let labels = [P, P, N, N];
        let r = evaluate(&labels, &labels).unwrap();
        assert_eq!(r.macro_precision, 1.0);
        assert_eq!(r.macro_recall, 1.0);
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.n_evaluated, 4);
    }

    #[test]
    fn worked_example() {
        let golds = [P, P, N, N];
        let preds = [P, N, N, N];
        let r = evaluate(&preds, &golds).unwrap();
        assert!((r.accuracy - 0.75).abs() < 1e-12);
        assert!((r.pos_precision - 1.0).abs() < 1e-12);
        assert!((r.pos_recall - 0.5).abs() < 1e-12);
        assert!((r.pos_f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.neg_precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.neg_recall - 1.0).abs() < 1e-12);
        assert!((r.neg_f1 - 0.8).abs() < 1e-12);
        assert!((r.macro_f1 - 0.73333333).abs() < 1e-4);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            evaluate(&[P], &[P, N]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn neutral_rejected() {
        assert!(matches!(
            evaluate(&[Polarity::Neutral], &[P]),
            Err(EvalError::NonBinaryLabel)
        ));
    }

    #[test]
    fn degenerate_all_one_class() {
        let r = evaluate(&[N, N], &[P, P]).unwrap();
        assert_eq!(r.pos_f1, 0.0);
        assert_eq!(r.accuracy, 0.0);
    }

    #[test]
    fn accuracy_is_exact_count_ratio() {
        let golds = [P, N, P, N, P];
        let preds = [P, P, P, N, N];
        let m = ConfusionMatrix::from_pairs(&preds, &golds).unwrap();
        let r = MetricsReport::from_confusion(&m);
        assert_eq!(r.accuracy, (m.tp + m.tn) as f64 / 5.0);
    }

    #[test]
    fn class_swap_symmetry() {
        let golds = [P, P, N, N, P];
        let preds = [P, N, N, P, P];
        let swap = |ls: &[Polarity]| -> Vec<Polarity> {
            ls.iter().map(|l| if *l == P { N } else { P }).collect()
        };
        let r = evaluate(&preds, &golds).unwrap();
        let s = evaluate(&swap(&preds), &swap(&golds)).unwrap();
        assert_eq!(r.accuracy, s.accuracy);
        assert_eq!(r.pos_precision, s.neg_precision);
        assert_eq!(r.pos_recall, s.neg_recall);
        assert_eq!(r.neg_f1, s.pos_f1);
    }

    #[test]
    fn permutation_invariance() {
        let golds = [P, N, P, N];
        let preds = [N, N, P, P];
        let r = evaluate(&preds, &golds).unwrap();
        let perm = [2usize, 0, 3, 1];
        let pg: Vec<Polarity> = perm.iter().map(|&i| golds[i]).collect();
        let pp: Vec<Polarity> = perm.iter().map(|&i| preds[i]).collect();
        assert_eq!(evaluate(&pp, &pg).unwrap(), r);
    }

    #[test]
    fn percent_rounds_half_up() {
        assert_eq!(percent(0.7333333), 73.3);
        assert_eq!(percent(0.0005), 0.1);
        assert_eq!(percent(1.0), 100.0);
    }
}
