use alloc::vec::Vec;
use core::fmt;

use super::{top_buggy_match, CandidateMatch, ThresholdConfig};
use crate::corpus::Label;
use crate::eval::ConfusionCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuneError {
    /// Validation data holds only one class; AUC is undefined.
    SingleClass(Label),
    Empty,
}

impl fmt::Display for TuneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TuneError::SingleClass(l) => {
                write!(f, "cannot tune threshold: every validation commit is {l}")
            }
            TuneError::Empty => f.write_str("cannot tune threshold: no validation commits"),
        }
    }
}

impl core::error::Error for TuneError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedThreshold {
    pub config: ThresholdConfig,
    /// Validation AUC of the hard verdicts at the chosen threshold.
    pub auc: f64,
}

/// Confusion counts of the threshold classifier's verdicts on a validation set.
pub fn threshold_auc_counts<M: AsRef<[CandidateMatch]>>(
    validation: &[(M, Label)],
    t_score: f64,
) -> ConfusionCounts {
    let mut counts = ConfusionCounts::default();
    for (matches, truth) in validation {
        let predicted = top_buggy_match(matches.as_ref()).is_some_and(|m| m.relevance_score > t_score);
        counts.record(predicted, truth.is_buggy());
    }
    counts
}

/// Picks the threshold that maximizes validation AUC of the threshold
/// classifier's verdicts.
///
/// Candidates are 0 and every distinct top-buggy-match score; the largest
/// observed score already predicts everything clean, so it also stands in for
/// an infinite threshold. Ties go to the larger threshold.
pub fn tune_threshold<M: AsRef<[CandidateMatch]>>(
    validation: &[(M, Label)],
) -> Result<TunedThreshold, TuneError> {
    let mut buggy_scores = Vec::new();
    let mut clean_scores = Vec::new();
    for (matches, truth) in validation {
        let score = top_buggy_match(matches.as_ref()).map(|m| m.relevance_score);
        match truth {
            Label::Buggy => buggy_scores.push(score),
            Label::Clean => clean_scores.push(score),
        }
    }
    let positives = buggy_scores.len() as u64;
    let negatives = clean_scores.len() as u64;
    match (positives, negatives) {
        (0, 0) => return Err(TuneError::Empty),
        (0, _) => return Err(TuneError::SingleClass(Label::Clean)),
        (_, 0) => return Err(TuneError::SingleClass(Label::Buggy)),
        _ => {}
    }

    let sorted = |v: Vec<Option<f64>>| {
        let mut s: Vec<f64> = v.into_iter().flatten().collect();
        s.sort_by(f64::total_cmp);
        s
    };
    let buggy_scores = sorted(buggy_scores);
    let clean_scores = sorted(clean_scores);

    let mut candidates: Vec<f64> = buggy_scores.iter().chain(&clean_scores).copied().collect();
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let above = |scores: &[f64], t: f64| (scores.len() - scores.partition_point(|&s| s <= t)) as u64;

    // AUC of hard verdicts = (tp/P + tn/N) / 2, compared exactly via tp*N + tn*P.
    let mut best: Option<(u64, f64)> = None;
    for &t in &candidates {
        let tp = above(&buggy_scores, t);
        let tn = negatives - above(&clean_scores, t);
        let numerator = tp * negatives + tn * positives;
        if best.is_none_or(|(b, _)| numerator >= b) {
            best = Some((numerator, t));
        }
    }
    let (numerator, t_score) = best.ok_or(TuneError::Empty)?;
    Ok(TunedThreshold {
        config: ThresholdConfig { t_score },
        auc: numerator as f64 / (2 * positives * negatives) as f64,
    })
}
