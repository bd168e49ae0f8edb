use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn record(&mut self, predicted_buggy: bool, actually_buggy: bool) {
        match (predicted_buggy, actually_buggy) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommitMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub far: f64,
    pub d2h: f64,
    /// Absent when the scored set holds only one class.
    pub auc: Option<f64>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn commit_metrics(counts: &ConfusionCounts, scores: &[(f64, Label)]) -> CommitMetrics {
    let precision = ratio(counts.tp, counts.tp + counts.fp);
    let recall = ratio(counts.tp, counts.tp + counts.fn_);
    let far = ratio(counts.fp, counts.fp + counts.tn);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let d2h = libm::sqrt((1.0 - recall) * (1.0 - recall) + far * far) / core::f64::consts::SQRT_2;
    CommitMetrics {
        precision,
        recall,
        f1,
        far,
        d2h,
        auc: roc_auc(scores),
    }
}

/// Area under the ROC curve via the rank-sum statistic; tied scores count
/// one half. `None` unless both classes are present.
pub fn roc_auc(scores: &[(f64, Label)]) -> Option<f64> {
    let positives = scores.iter().filter(|(_, l)| l.is_buggy()).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return None;
    }
    let mut sorted: Vec<&(f64, Label)> = scores.iter().collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    // sum of 1-based mid-ranks of the positives
    let mut rank_sum = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1].0 == sorted[i].0 {
            j += 1;
        }
        let mid_rank = (i + j + 2) as f64 / 2.0;
        let group_pos = sorted[i..=j].iter().filter(|(_, l)| l.is_buggy()).count();
        rank_sum += mid_rank * group_pos as f64;
        i = j + 1;
    }
    let p = positives as f64;
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Some(u / (p * negatives as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineMetrics {
    pub top_k_accuracy: f64,
    pub recall_at_20pct_loc: f64,
    pub effort_at_20pct_recall: f64,
    /// Clean lines ranked above the first buggy one.
    pub ifa: u32,
}

/// Line-level effort metrics for one commit. `buggy_in_rank_order[i]` tells
/// whether the line ranked `i + 1` is actually buggy.
pub fn line_metrics(buggy_in_rank_order: &[bool], k: usize) -> LineMetrics {
    let n = buggy_in_rank_order.len();
    let total_buggy = buggy_in_rank_order.iter().filter(|&&b| b).count();
    let buggy_in_first = |r: usize| buggy_in_rank_order[..r.min(n)].iter().filter(|&&b| b).count();

    let top = k.max(1).min(n);
    let top_k_accuracy = ratio(buggy_in_first(top) as u64, top as u64);

    // ceil(0.2 * x) in integers
    let loc_cut = n.div_ceil(5);
    let recall_at_20pct_loc = ratio(buggy_in_first(loc_cut) as u64, total_buggy as u64);

    let needed = total_buggy.div_ceil(5);
    let effort_at_20pct_recall = if total_buggy == 0 || n == 0 {
        0.0
    } else {
        let mut seen = 0;
        let mut r = n;
        for (i, &b) in buggy_in_rank_order.iter().enumerate() {
            if b {
                seen += 1;
            }
            if seen >= needed {
                r = i + 1;
                break;
            }
        }
        r as f64 / n as f64
    };

    let ifa = buggy_in_rank_order.iter().position(|&b| b).unwrap_or(n) as u32;

    LineMetrics {
        top_k_accuracy,
        recall_at_20pct_loc,
        effort_at_20pct_recall,
        ifa,
    }
}
