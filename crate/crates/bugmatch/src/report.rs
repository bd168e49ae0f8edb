//! Evaluation output: a per-period CSV table, one JSON record per period, the
//! cross-period medians and a run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use bugmatch_core::eval::{summarize, MetricSummary};
use bugmatch_core::{EvalMode, PeriodReport};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

#[derive(Debug, Serialize)]
struct CsvRow {
    mode: EvalMode,
    period: usize,
    train_start: i64,
    train_end: i64,
    gap_start: i64,
    test_start: i64,
    test_end: i64,
    train_commits: usize,
    gap_commits: usize,
    test_commits: usize,
    test_buggy: usize,
    indexed_documents: usize,
    t_score: Option<f64>,
    tp: u64,
    fp: u64,
    tn: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    precision: f64,
    recall: f64,
    f1: f64,
    far: f64,
    d2h: f64,
    auc: Option<f64>,
    top_k_accuracy: Option<f64>,
    recall_at_20pct_loc: Option<f64>,
    effort_at_20pct_recall: Option<f64>,
    ifa: Option<u32>,
    line_evaluated_commits: usize,
}

fn csv_row(r: &PeriodReport) -> CsvRow {
    let s = &r.split;
    let m = &r.metrics;
    CsvRow {
        mode: s.mode,
        period: s.period_index,
        train_start: s.train_range.start,
        train_end: s.train_range.end,
        gap_start: s.gap_range.start,
        test_start: s.test_range.start,
        test_end: s.test_range.end,
        train_commits: r.train_commits,
        gap_commits: r.gap_commits,
        test_commits: r.test_commits,
        test_buggy: r.test_buggy,
        indexed_documents: r.indexed_documents,
        t_score: r.classifier.threshold.map(|t| t.t_score),
        tp: r.counts.tp,
        fp: r.counts.fp,
        tn: r.counts.tn,
        fn_: r.counts.fn_,
        precision: m.precision,
        recall: m.recall,
        f1: m.f1,
        far: m.far,
        d2h: m.d2h,
        auc: m.auc,
        top_k_accuracy: m.top_k_accuracy,
        recall_at_20pct_loc: m.recall_at_20pct_loc,
        effort_at_20pct_recall: m.effort_at_20pct_recall,
        ifa: m.ifa,
        line_evaluated_commits: m.line_evaluated_commits,
    }
}

pub fn write_periods_csv<W: Write>(reports: &[PeriodReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(csv_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// One record per period, without the per-commit outcomes.
pub fn write_periods_jsonl<W: Write>(reports: &[PeriodReport], mut out: W) -> Result<()> {
    for r in reports {
        let mut value = serde_json::to_value(r)?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("outcomes");
        }
        serde_json::to_writer(&mut out, &value)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_outcomes_jsonl<W: Write>(reports: &[PeriodReport], mut out: W) -> Result<()> {
    for r in reports {
        for o in &r.outcomes {
            let record = serde_json::json!({
                "mode": r.split.mode,
                "period": r.split.period_index,
                "outcome": o,
            });
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ModeSummary {
    pub mode: EvalMode,
    pub medians: MetricSummary,
}

pub fn mode_summaries(reports: &[PeriodReport]) -> Vec<ModeSummary> {
    [EvalMode::Increasing, EvalMode::Constant]
        .into_iter()
        .filter_map(|mode| {
            let of_mode: Vec<PeriodReport> = reports
                .iter()
                .filter(|r| r.split.mode == mode)
                .cloned()
                .collect();
            (!of_mode.is_empty()).then(|| ModeSummary {
                mode,
                medians: summarize(&of_mode),
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub corpus_sha256: Option<String>,
    pub seed: u64,
    pub config: &'a RunConfig,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn write_manifest(dir: &Path, manifest: &Manifest<'_>) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut w = create(dir, "manifest.json")?;
    serde_json::to_writer_pretty(&mut w, manifest)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes `periods.csv`, `periods.jsonl`, `outcomes.jsonl` and
/// `summary.json` into `dir`.
pub fn write_evaluation(dir: &Path, reports: &[PeriodReport]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_periods_csv(reports, create(dir, "periods.csv")?)?;
    write_periods_jsonl(reports, create(dir, "periods.jsonl")?)?;
    write_outcomes_jsonl(reports, create(dir, "outcomes.jsonl")?)?;
    let mut w = create(dir, "summary.json")?;
    serde_json::to_writer_pretty(&mut w, &mode_summaries(reports))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

/// Human-readable period table followed by medians.
pub fn print_table<W: Write>(reports: &[PeriodReport], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<10} {:>3} {:>6} {:>5} {:>5} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>4}",
        "mode", "#", "train", "test", "buggy", "prec", "recall", "f1", "far", "d2h", "auc", "top-k", "ifa"
    )?;
    for r in reports {
        let m = &r.metrics;
        writeln!(
            out,
            "{:<10} {:>3} {:>6} {:>5} {:>5} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6} {:>6} {:>4}",
            r.split.mode.as_str(),
            r.split.period_index,
            r.train_commits,
            r.test_commits,
            r.test_buggy,
            m.precision,
            m.recall,
            m.f1,
            m.far,
            m.d2h,
            opt(m.auc),
            opt(m.top_k_accuracy),
            m.ifa.map_or_else(|| "-".into(), |v| v.to_string()),
        )?;
    }
    for s in mode_summaries(reports) {
        let m = &s.medians;
        writeln!(
            out,
            "median {:<10} periods={} precision={} recall={} f1={} far={} d2h={} auc={} top-k={} recall@20%loc={} effort@20%recall={} ifa={}",
            s.mode.as_str(),
            m.periods,
            opt(m.precision),
            opt(m.recall),
            opt(m.f1),
            opt(m.far),
            opt(m.d2h),
            opt(m.auc),
            opt(m.top_k_accuracy),
            opt(m.recall_at_20pct_loc),
            opt(m.effort_at_20pct_recall),
            opt(m.ifa),
        )?;
    }
    Ok(())
}

