//! Classifiers that turn a commit's candidate matches into a verdict.

mod la;
mod tune;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::index::SearchHit;

pub use la::{la_classify, train_la, LaModel, LaOptions};
pub use tune::{threshold_auc_counts, tune_threshold, TuneError, TunedThreshold};

/// A retrieved past change, as seen by the classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateMatch {
    pub relevance_score: f64,
    pub label: Label,
    pub doc_id: u32,
    pub commit_hash: String,
}

impl From<&SearchHit> for CandidateMatch {
    fn from(hit: &SearchHit) -> Self {
        CandidateMatch {
            relevance_score: hit.relevance_score,
            label: hit.label,
            doc_id: hit.doc_id,
            commit_hash: hit.commit_hash.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub verdict: Label,
    /// Estimated probability of the commit being buggy.
    pub confidence: f64,
    pub supporting_matches: Vec<CandidateMatch>,
}

impl Prediction {
    fn clean() -> Self {
        Prediction {
            verdict: Label::Clean,
            confidence: 0.0,
            supporting_matches: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub t_score: f64,
}

fn by_score_desc(matches: &[CandidateMatch]) -> Vec<&CandidateMatch> {
    let mut sorted: Vec<&CandidateMatch> = matches.iter().collect();
    sorted.sort_by(|a, b| b.relevance_score.total_cmp(&a.relevance_score));
    sorted
}

/// Majority label of the `k` highest-scoring matches. An even split counts as
/// buggy; no matches at all is clean.
pub fn knn_classify(matches: &[CandidateMatch], k: usize) -> Prediction {
    let top: Vec<CandidateMatch> = by_score_desc(matches)
        .into_iter()
        .take(k.max(1))
        .cloned()
        .collect();
    if top.is_empty() {
        return Prediction::clean();
    }
    let buggy = top.iter().filter(|m| m.label.is_buggy()).count();
    let verdict = if 2 * buggy >= top.len() {
        Label::Buggy
    } else {
        Label::Clean
    };
    Prediction {
        verdict,
        confidence: buggy as f64 / top.len() as f64,
        supporting_matches: top,
    }
}

/// The highest-scoring buggy match, first one wins on equal scores.
pub fn top_buggy_match(matches: &[CandidateMatch]) -> Option<&CandidateMatch> {
    by_score_desc(matches).into_iter().find(|m| m.label.is_buggy())
}

/// Buggy iff the top buggy match scores strictly above `t_score`.
pub fn threshold_classify(matches: &[CandidateMatch], cfg: ThresholdConfig) -> Prediction {
    let Some(top) = top_buggy_match(matches) else {
        return Prediction::clean();
    };
    let score = top.relevance_score;
    let verdict = if score > cfg.t_score {
        Label::Buggy
    } else {
        Label::Clean
    };
    let confidence = if cfg.t_score > 0.0 {
        (score / (2.0 * cfg.t_score)).clamp(0.0, 1.0)
    } else if verdict.is_buggy() {
        1.0
    } else {
        0.0
    };
    Prediction {
        verdict,
        confidence,
        supporting_matches: alloc::vec![top.clone()],
    }
}

/// Soft vote: buggy iff the mean member confidence is at least 0.5.
///
/// Confidences are summed in sorted order so the result does not depend on
/// member order.
pub fn ensemble_classify(predictions: &[Prediction]) -> Prediction {
    if predictions.is_empty() {
        return Prediction::clean();
    }
    let mut confidences: Vec<f64> = predictions.iter().map(|p| p.confidence).collect();
    confidences.sort_by(f64::total_cmp);
    let mean = confidences.iter().sum::<f64>() / confidences.len() as f64;

    let mut support: BTreeMap<u32, CandidateMatch> = BTreeMap::new();
    for m in predictions.iter().flat_map(|p| &p.supporting_matches) {
        support.entry(m.doc_id).or_insert_with(|| m.clone());
    }
    let mut supporting_matches: Vec<CandidateMatch> = support.into_values().collect();
    supporting_matches.sort_by(|a, b| {
        b.relevance_score
            .total_cmp(&a.relevance_score)
            .then(a.doc_id.cmp(&b.doc_id))
    });

    Prediction {
        verdict: if mean >= 0.5 { Label::Buggy } else { Label::Clean },
        confidence: mean,
        supporting_matches,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Member {
    Knn,
    Threshold,
    La,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdSetting {
    Fixed(f64),
    /// Tuned for AUC on the training data.
    Auto,
}

/// Which classifiers vote, and their parameters. A single member is used as
/// is; two or more are combined with [`ensemble_classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub members: Vec<Member>,
    pub k: usize,
    pub t_score: ThresholdSetting,
    pub la: LaOptions,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            members: alloc::vec![Member::Knn, Member::La],
            k: 3,
            t_score: ThresholdSetting::Auto,
            la: LaOptions::default(),
        }
    }
}

impl ClassifierConfig {
    pub fn uses(&self, member: Member) -> bool {
        self.members.contains(&member)
    }
}

/// A classifier configuration together with its fitted parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedClassifier {
    pub config: ClassifierConfig,
    pub threshold: Option<ThresholdConfig>,
    pub la_model: Option<LaModel>,
}

impl FittedClassifier {
    /// Classifies one commit from its candidate matches and lines-added count.
    /// Members that were not fitted are left out of the vote.
    pub fn predict(&self, matches: &[CandidateMatch], la: u64) -> Prediction {
        let mut members: Vec<Member> = self.config.members.clone();
        members.sort();
        members.dedup();
        let votes: Vec<Prediction> = members
            .into_iter()
            .filter_map(|m| match m {
                Member::Knn => Some(knn_classify(matches, self.config.k)),
                Member::Threshold => self.threshold.map(|t| threshold_classify(matches, t)),
                Member::La => self.la_model.as_ref().map(|model| la_classify(model, la)),
            })
            .collect();
        match votes.len() {
            0 => Prediction::clean(),
            1 => votes.into_iter().next().unwrap_or_else(Prediction::clean),
            _ => ensemble_classify(&votes),
        }
    }
}
