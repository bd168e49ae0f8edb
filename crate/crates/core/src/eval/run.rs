use alloc::vec::Vec;

use super::{
    commit_metrics, line_metrics, split_periods, CommitOutcome, ConfusionCounts, EvalConfig,
    EvalError, EvalMode, MetricReport, PeriodReport, PeriodSplit, Role,
};
use crate::corpus::{Commit, Label};
use crate::index::InvertedIndex;
use crate::pipeline::{fit_classifier, line_truth_in_rank_order, predict_commit};

fn sorted_by_time(commits: &[Commit]) -> Vec<&Commit> {
    let mut sorted: Vec<&Commit> = commits.iter().collect();
    sorted.sort_by_key(|c| c.author_ts);
    sorted
}

/// Batch index over the training commits of one period.
pub fn build_period_index(commits: &[&Commit], split: &PeriodSplit) -> InvertedIndex {
    let docs: Vec<_> = commits
        .iter()
        .filter(|c| split.role(c.author_ts) == Role::Train)
        .flat_map(|c| c.changes.iter().map(move |ch| (ch, c.author_ts)))
        .collect();
    InvertedIndex::from_changes(Default::default(), docs)
}

fn lower_median(mut v: Vec<u32>) -> Option<u32> {
    if v.is_empty() {
        return None;
    }
    v.sort_unstable();
    Some(v[(v.len() - 1) / 2])
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Evaluates one period against an index that holds exactly the data the
/// period may train on. `commits` must be sorted by author timestamp.
pub fn evaluate_period(
    commits: &[&Commit],
    split: &PeriodSplit,
    index: &InvertedIndex,
    config: &EvalConfig,
) -> Result<PeriodReport, EvalError> {
    let index_max_ts = index.documents().iter().map(|d| d.author_ts).max();
    if index_max_ts.is_some_and(|t| t >= split.gap_range.start) {
        return Err(EvalError::TimeTravel {
            period_index: split.period_index,
        });
    }

    let mut training = Vec::new();
    let mut test = Vec::new();
    let mut gap_commits = 0;
    for &c in commits {
        match split.role(c.author_ts) {
            Role::Train => training.push(c),
            Role::Test => test.push(c),
            Role::Gap => gap_commits += 1,
            Role::Unused => {}
        }
    }

    let fitted = fit_classifier(index, &training, &config.classifier, &config.mlt);

    let mut counts = ConfusionCounts::default();
    let mut scores = Vec::with_capacity(test.len());
    let mut outcomes = Vec::with_capacity(test.len());
    for commit in &test {
        let out = predict_commit(index, &fitted, &commit.changes, &config.mlt, &config.linerank);
        let verdict = out.prediction.verdict;
        counts.record(verdict.is_buggy(), commit.label.is_buggy());
        scores.push((out.prediction.confidence, commit.label));

        let line = match (&out.ranked_lines, verdict, commit.label) {
            (Some(ranked), Label::Buggy, Label::Buggy) if commit.has_line_labels() => {
                let truth = line_truth_in_rank_order(&commit.changes, ranked);
                Some(line_metrics(&truth, config.top_k_lines))
            }
            _ => None,
        };
        outcomes.push(CommitOutcome {
            commit_hash: commit.hash.clone(),
            author_ts: commit.author_ts,
            truth: commit.label,
            verdict,
            confidence: out.prediction.confidence,
            line_metrics: line,
        });
    }

    let cm = commit_metrics(&counts, &scores);
    let lines: Vec<_> = outcomes.iter().filter_map(|o| o.line_metrics).collect();
    let collect = |f: fn(&super::LineMetrics) -> f64| lines.iter().map(f).collect::<Vec<f64>>();
    let metrics = MetricReport {
        precision: cm.precision,
        recall: cm.recall,
        f1: cm.f1,
        far: cm.far,
        d2h: cm.d2h,
        auc: cm.auc,
        top_k_accuracy: mean(&collect(|l| l.top_k_accuracy)),
        recall_at_20pct_loc: mean(&collect(|l| l.recall_at_20pct_loc)),
        effort_at_20pct_recall: mean(&collect(|l| l.effort_at_20pct_recall)),
        ifa: lower_median(lines.iter().map(|l| l.ifa).collect()),
        line_evaluated_commits: lines.len(),
    };

    Ok(PeriodReport {
        split: *split,
        train_commits: training.len(),
        gap_commits,
        test_commits: test.len(),
        test_buggy: test.iter().filter(|c| c.label.is_buggy()).count(),
        indexed_documents: index.len(),
        index_max_ts,
        test_min_ts: test.iter().map(|c| c.author_ts).min(),
        test_max_ts: test.iter().map(|c| c.author_ts).max(),
        classifier: fitted,
        counts,
        metrics,
        outcomes,
    })
}

/// Runs every period of `mode` in order. Increasing mode grows a single
/// index; constant mode builds a fresh one per period.
pub fn run_evaluation(
    commits: &[Commit],
    mode: EvalMode,
    config: &EvalConfig,
) -> Result<Vec<PeriodReport>, EvalError> {
    let sorted = sorted_by_time(commits);
    let timestamps: Vec<i64> = sorted.iter().map(|c| c.author_ts).collect();
    let splits = split_periods(&timestamps, config.window_days, config.gap_days, mode)?;

    let mut reports = Vec::with_capacity(splits.len());
    match mode {
        EvalMode::Increasing => {
            let mut index = InvertedIndex::default();
            let mut next = 0;
            for split in &splits {
                while next < sorted.len() && sorted[next].author_ts < split.train_range.end {
                    let c = sorted[next];
                    for change in &c.changes {
                        index.add_document(change, c.author_ts);
                    }
                    next += 1;
                }
                reports.push(evaluate_period(&sorted, split, &index, config)?);
            }
        }
        EvalMode::Constant => {
            for split in &splits {
                let index = build_period_index(&sorted, split);
                reports.push(evaluate_period(&sorted, split, &index, config)?);
            }
        }
    }
    Ok(reports)
}
