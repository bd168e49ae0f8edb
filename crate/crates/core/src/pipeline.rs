//! Commit-level prediction: per-file queries merged into one candidate set,
//! classifier fitting on a training index, and line ranking for buggy verdicts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::classify::{
    train_la, tune_threshold, CandidateMatch, ClassifierConfig, FittedClassifier, Member,
    Prediction, ThresholdConfig, ThresholdSetting,
};
use crate::corpus::{Change, Commit, Label};
use crate::index::{InvertedIndex, MltParams, SearchHit};
use crate::linerank::{
    extract_buggy_tokens, merge_fields, rank_lines, BuggyTokenSet, LineRankConfig, RankedLine,
    TokenSource,
};

/// Runs one more-like-this query per change and merges the hits. A document
/// hit by several queries keeps its best-scoring hit. Documents of
/// `exclude_commit` are never returned.
pub fn candidate_hits(
    index: &InvertedIndex,
    changes: &[Change],
    mlt: &MltParams,
    exclude_commit: Option<&str>,
) -> Vec<SearchHit> {
    let mut best: BTreeMap<u32, SearchHit> = BTreeMap::new();
    for change in changes {
        if change.lines_added.is_empty() {
            continue;
        }
        let hits = match exclude_commit {
            Some(skip) => index.mlt_query_filtered(&change.lines_added, mlt, |d| d.commit_hash != skip),
            None => index.mlt_query(&change.lines_added, mlt),
        };
        for hit in hits {
            match best.get(&hit.doc_id) {
                Some(prev) if prev.relevance_score >= hit.relevance_score => {}
                _ => {
                    best.insert(hit.doc_id, hit);
                }
            }
        }
    }
    let mut merged: Vec<SearchHit> = best.into_values().collect();
    merged.sort_by(|a, b| {
        b.relevance_score
            .total_cmp(&a.relevance_score)
            .then(a.doc_id.cmp(&b.doc_id))
    });
    merged
}

pub fn to_matches(hits: &[SearchHit]) -> Vec<CandidateMatch> {
    hits.iter().map(CandidateMatch::from).collect()
}

/// Fits the parts of `config` that need training data: the lines-added model
/// and, for an automatic threshold, `t_score`. The threshold is tuned by
/// querying every training commit against `index` with its own documents
/// held out.
pub fn fit_classifier(
    index: &InvertedIndex,
    training: &[&Commit],
    config: &ClassifierConfig,
    mlt: &MltParams,
) -> FittedClassifier {
    let la_model = config.uses(Member::La).then(|| {
        let data: Vec<(u64, Label)> = training.iter().map(|c| (c.la(), c.label)).collect();
        train_la(&data, &config.la)
    });

    let threshold = config.uses(Member::Threshold).then(|| match config.t_score {
        ThresholdSetting::Fixed(t_score) => ThresholdConfig { t_score },
        ThresholdSetting::Auto => {
            let validation: Vec<(Vec<CandidateMatch>, Label)> = training
                .iter()
                .map(|c| {
                    let hits = candidate_hits(index, &c.changes, mlt, Some(&c.hash));
                    (to_matches(&hits), c.label)
                })
                .collect();
            match tune_threshold(&validation) {
                Ok(tuned) => tuned.config,
                Err(e) => {
                    log::warn!("{e}; using t_score = 0");
                    ThresholdConfig { t_score: 0.0 }
                }
            }
        }
    });

    FittedClassifier {
        config: config.clone(),
        threshold,
        la_model,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommitPrediction {
    pub prediction: Prediction,
    pub candidates: Vec<SearchHit>,
    pub buggy_tokens: Option<BuggyTokenSet>,
    /// Present for buggy verdicts that have at least one buggy candidate.
    pub ranked_lines: Option<Vec<RankedLine>>,
}

/// `(file_path, line)` for every added line of the commit, in order.
pub fn commit_lines(changes: &[Change]) -> Vec<(String, String)> {
    changes
        .iter()
        .flat_map(|c| c.lines_added.iter().map(|l| (c.file_path.clone(), l.clone())))
        .collect()
}

/// Buggy tokens for a set of candidates: from the top buggy hit, or the union
/// of all buggy hits keeping each term's largest weight.
pub fn buggy_tokens(candidates: &[SearchHit], config: &LineRankConfig) -> Option<BuggyTokenSet> {
    let top = candidates.iter().find(|h| h.label.is_buggy())?;
    let weights = match config.source {
        TokenSource::TopBuggy => merge_fields(&top.term_contributions),
        TokenSource::Union => {
            let mut all: BTreeMap<String, f64> = BTreeMap::new();
            for hit in candidates.iter().filter(|h| h.label.is_buggy()) {
                for (term, w) in merge_fields(&hit.term_contributions) {
                    let slot = all.entry(term).or_insert(w);
                    *slot = slot.max(w);
                }
            }
            all
        }
    };
    extract_buggy_tokens(&weights, config.top_m, top.doc_id).ok()
}

pub fn predict_commit(
    index: &InvertedIndex,
    fitted: &FittedClassifier,
    changes: &[Change],
    mlt: &MltParams,
    linerank: &LineRankConfig,
) -> CommitPrediction {
    let candidates = candidate_hits(index, changes, mlt, None);
    let la = changes.iter().map(|c| c.lines_added.len() as u64).sum();
    let prediction = fitted.predict(&to_matches(&candidates), la);

    let (buggy_tokens, ranked_lines) = if prediction.verdict.is_buggy() {
        match buggy_tokens(&candidates, linerank) {
            Some(tokens) => {
                let ranked = rank_lines(&commit_lines(changes), &tokens, linerank.counting);
                (Some(tokens), Some(ranked))
            }
            None => (None, None),
        }
    } else {
        (None, None)
    };

    CommitPrediction {
        prediction,
        candidates,
        buggy_tokens,
        ranked_lines,
    }
}

/// Ground-truth flags for ranked lines, looked up by their position among the
/// commit's added lines.
pub fn line_truth_in_rank_order(changes: &[Change], ranked: &[RankedLine]) -> Vec<bool> {
    let mut flat = Vec::new();
    for change in changes {
        let start = flat.len();
        flat.resize(start + change.lines_added.len(), false);
        for &i in &change.buggy_lines {
            if let Some(slot) = flat.get_mut(start + i as usize) {
                *slot = true;
            }
        }
    }
    ranked
        .iter()
        .map(|l| flat.get(l.position as usize - 1).copied().unwrap_or(false))
        .collect()
}
