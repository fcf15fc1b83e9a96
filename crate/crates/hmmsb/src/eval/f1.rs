//! Pair-counting F1 between hierarchies.

use crate::path::PathAssignment;

/// Pair-counting components and scores at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Level {
    pub level: usize,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Per-level scores plus their arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct F1Report {
    pub per_level: Vec<F1Level>,
    pub total: f64,
}

/// Scores `predicted` against `truth` at one level: an unordered actor pair
/// counts as together when the two actors share their length-`k` path
/// prefix. Branch labels never matter, only prefix equality.
///
/// Degenerate conventions: with no positive pairs in either argument the
/// scores are all 1; otherwise an empty side yields precision or recall 0,
/// and F1 is 0 whenever precision + recall is 0.
pub fn f1_at_level(predicted: &PathAssignment, truth: &PathAssignment, k: usize) -> F1Level {
    assert_eq!(
        predicted.n_actors(),
        truth.n_actors(),
        "hierarchies cover different actor sets"
    );
    assert!(
        k >= 1 && k <= predicted.depth() && k <= truth.depth(),
        "level {k} outside both hierarchies"
    );
    let n = predicted.n_actors();
    let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..n {
        for j in (i + 1)..n {
            let in_predicted = predicted.path(i)[..k] == predicted.path(j)[..k];
            let in_truth = truth.path(i)[..k] == truth.path(j)[..k];
            match (in_predicted, in_truth) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
    }
    let (precision, recall, f1) = if tp + fp == 0 && tp + fn_ == 0 {
        (1.0, 1.0, 1.0)
    } else {
        let precision = if tp + fp == 0 {
            0.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            0.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        (precision, recall, f1)
    };
    F1Level {
        level: k,
        tp,
        fp,
        fn_,
        tn,
        precision,
        recall,
        f1,
    }
}

/// Scores all levels `1..=K` and averages.
pub fn f1_report(predicted: &PathAssignment, truth: &PathAssignment) -> F1Report {
    assert_eq!(predicted.depth(), truth.depth(), "hierarchy depths differ");
    let per_level: Vec<F1Level> = (1..=predicted.depth())
        .map(|k| f1_at_level(predicted, truth, k))
        .collect();
    let total = per_level.iter().map(|l| l.f1).sum::<f64>() / per_level.len() as f64;
    F1Report { per_level, total }
}

/// Mean of the per-level F1 scores.
pub fn total_f1(predicted: &PathAssignment, truth: &PathAssignment) -> f64 {
    f1_report(predicted, truth).total
}
