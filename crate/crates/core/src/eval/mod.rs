//! Chronological online evaluation.
//!
//! History is cut into fixed windows; each later window is a test period,
//! preceded by a verification-latency gap whose commits are neither trained on
//! nor tested. Increasing mode trains on everything before the gap, constant
//! mode on the single window before it.

mod metrics;
mod run;
mod split;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierConfig, FittedClassifier};
use crate::corpus::Label;
use crate::index::MltParams;
use crate::linerank::LineRankConfig;

pub use metrics::{
    commit_metrics, line_metrics, roc_auc, CommitMetrics, ConfusionCounts, LineMetrics,
};
pub use run::{build_period_index, evaluate_period, run_evaluation};
pub use split::{split_periods, PeriodSplit, Role, TimeRange, SECONDS_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Increasing,
    Constant,
}

impl EvalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalMode::Increasing => "increasing",
            EvalMode::Constant => "constant",
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    InvalidWindow,
    Unsorted,
    TooShort { span_seconds: i64, required_seconds: i64 },
    /// A document indexed for a period is not older than its gap.
    TimeTravel { period_index: usize },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::InvalidWindow => f.write_str("window length must be at least one day"),
            EvalError::Unsorted => f.write_str("commits are not sorted by author timestamp"),
            EvalError::TooShort {
                span_seconds,
                required_seconds,
            } => write!(
                f,
                "corpus spans {:.1} days but window + gap needs {:.1} days",
                *span_seconds as f64 / SECONDS_PER_DAY as f64,
                *required_seconds as f64 / SECONDS_PER_DAY as f64
            ),
            EvalError::TimeTravel { period_index } => {
                write!(f, "period {period_index}: training index contains commits from the gap or test window")
            }
        }
    }
}

impl core::error::Error for EvalError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub window_days: u32,
    pub gap_days: u32,
    pub mlt: MltParams,
    pub classifier: ClassifierConfig,
    pub linerank: LineRankConfig,
    /// `K` of the top-K line accuracy.
    pub top_k_lines: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            window_days: 180,
            gap_days: 0,
            mlt: MltParams::default(),
            classifier: ClassifierConfig::default(),
            linerank: LineRankConfig::default(),
            top_k_lines: 10,
        }
    }
}

/// Commit- and line-level metrics of one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub far: f64,
    pub d2h: f64,
    pub auc: Option<f64>,
    /// Line metrics average over correctly predicted buggy commits that carry
    /// line labels; IFA is their (lower) median.
    pub top_k_accuracy: Option<f64>,
    pub recall_at_20pct_loc: Option<f64>,
    pub effort_at_20pct_recall: Option<f64>,
    pub ifa: Option<u32>,
    pub line_evaluated_commits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitOutcome {
    pub commit_hash: String,
    pub author_ts: i64,
    pub truth: Label,
    pub verdict: Label,
    pub confidence: f64,
    pub line_metrics: Option<LineMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub split: PeriodSplit,
    pub train_commits: usize,
    pub gap_commits: usize,
    pub test_commits: usize,
    pub test_buggy: usize,
    pub indexed_documents: usize,
    /// Newest author timestamp among indexed documents.
    pub index_max_ts: Option<i64>,
    pub test_min_ts: Option<i64>,
    pub test_max_ts: Option<i64>,
    pub classifier: FittedClassifier,
    pub counts: ConfusionCounts,
    pub metrics: MetricReport,
    pub outcomes: Vec<CommitOutcome>,
}

/// Median of the present values; the mean of the two middle ones for even
/// counts.
pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Medians of every metric across periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub periods: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub far: Option<f64>,
    pub d2h: Option<f64>,
    pub auc: Option<f64>,
    pub top_k_accuracy: Option<f64>,
    pub recall_at_20pct_loc: Option<f64>,
    pub effort_at_20pct_recall: Option<f64>,
    pub ifa: Option<f64>,
}

pub fn summarize(reports: &[PeriodReport]) -> MetricSummary {
    let m = |f: fn(&MetricReport) -> Option<f64>| median(reports.iter().filter_map(|r| f(&r.metrics)));
    MetricSummary {
        periods: reports.len(),
        precision: m(|r| Some(r.precision)),
        recall: m(|r| Some(r.recall)),
        f1: m(|r| Some(r.f1)),
        far: m(|r| Some(r.far)),
        d2h: m(|r| Some(r.d2h)),
        auc: m(|r| r.auc),
        top_k_accuracy: m(|r| r.top_k_accuracy),
        recall_at_20pct_loc: m(|r| r.recall_at_20pct_loc),
        effort_at_20pct_recall: m(|r| r.effort_at_20pct_recall),
        ifa: m(|r| r.ifa.map(f64::from)),
    }
}
