//! Straightforward reimplementations used as test oracles. Nothing here shares
//! code with the library beyond the analyzers and plain data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use bugmatch_core::classify::CandidateMatch;
use bugmatch_core::{AnalyzerKind, Label};

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;

fn term_counts(kind: AnalyzerKind, lines: &[String]) -> BTreeMap<String, u32> {
    let mut counts = BTreeMap::new();
    for line in lines {
        for t in kind.terms(line) {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    counts
}

/// A corpus held as plain per-field term counts.
pub struct BruteCorpus {
    /// `[camelcase, shingle]` counts per document.
    pub docs: Vec<[BTreeMap<String, u32>; 2]>,
}

const KINDS: [AnalyzerKind; 2] = [AnalyzerKind::CamelCase, AnalyzerKind::Shingle];

impl BruteCorpus {
    pub fn new(docs: &[Vec<String>]) -> Self {
        BruteCorpus {
            docs: docs
                .iter()
                .map(|lines| KINDS.map(|k| term_counts(k, lines)))
                .collect(),
        }
    }

    fn df(&self, f: usize, term: &str) -> usize {
        self.docs.iter().filter(|d| d[f].contains_key(term)).count()
    }

    fn len(&self, doc: usize, f: usize) -> f64 {
        self.docs[doc][f].values().map(|&v| f64::from(v)).sum()
    }

    fn avgdl(&self, f: usize) -> f64 {
        let total: f64 = (0..self.docs.len()).map(|d| self.len(d, f)).sum();
        total / self.docs.len() as f64
    }

    pub fn idf(&self, f: usize, term: &str) -> f64 {
        let n = self.docs.len() as f64;
        let df = self.df(f, term) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Per field, probe terms ranked by probe tf times idf (ties by text),
    /// at most `max_terms`, skipping terms found in no document.
    pub fn query(&self, probe: &[String], max_terms: usize) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        for (f, kind) in KINDS.into_iter().enumerate() {
            let mut scored: Vec<(f64, String)> = term_counts(kind, probe)
                .into_iter()
                .filter(|(t, _)| self.df(f, t) > 0)
                .map(|(t, tf)| (f64::from(tf) * self.idf(f, &t), t))
                .collect();
            scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            out.extend(scored.into_iter().take(max_terms).map(|(_, t)| (f, t)));
        }
        out
    }

    pub fn term_score(&self, doc: usize, f: usize, term: &str) -> f64 {
        let tf = f64::from(*self.docs[doc][f].get(term).unwrap_or(&0));
        if tf == 0.0 {
            return 0.0;
        }
        let norm = tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * self.len(doc, f) / self.avgdl(f)));
        self.idf(f, term) * norm
    }

    pub fn score(&self, doc: usize, query: &[(usize, String)]) -> Option<f64> {
        let hits: Vec<f64> = query
            .iter()
            .filter(|(f, t)| self.docs[doc][*f].contains_key(t))
            .map(|(f, t)| self.term_score(doc, *f, t))
            .collect();
        (!hits.is_empty()).then(|| hits.iter().sum())
    }

    /// `(doc, score)` of matching documents, best first, ties by doc.
    pub fn ranking(&self, probe: &[String], max_terms: usize) -> Vec<(usize, f64)> {
        let query = self.query(probe, max_terms);
        let mut ranked: Vec<(usize, f64)> = (0..self.docs.len())
            .filter_map(|d| self.score(d, &query).map(|s| (d, s)))
            .collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        ranked
    }
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// AUC by counting every (buggy, clean) pair: twice the number of correctly
/// ordered pairs plus ties, over twice the pair count.
pub fn pair_auc(scores: &[(f64, Label)]) -> Option<(u64, u64)> {
    let pos: Vec<f64> = scores.iter().filter(|s| s.1.is_buggy()).map(|s| s.0).collect();
    let neg: Vec<f64> = scores.iter().filter(|s| !s.1.is_buggy()).map(|s| s.0).collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut twice = 0u64;
    for &p in &pos {
        for &n in &neg {
            twice += if p > n { 2 } else if p == n { 1 } else { 0 };
        }
    }
    Some((twice, 2 * pos.len() as u64 * neg.len() as u64))
}

pub struct BruteCommitMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub far: f64,
    pub d2h: f64,
}

pub fn commit_metrics(predicted: &[bool], actual: &[bool]) -> BruteCommitMetrics {
    let count = |p: bool, a: bool| predicted.iter().zip(actual).filter(|&(&x, &y)| x == p && y == a).count() as f64;
    let (tp, fp, tn, fn_) = (count(true, true), count(true, false), count(false, false), count(false, true));
    let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let precision = div(tp, tp + fp);
    let recall = div(tp, tp + fn_);
    let far = div(fp, fp + tn);
    let f1 = div(2.0 * precision * recall, precision + recall);
    let d2h = (((1.0 - recall).powi(2) + far.powi(2)) / 2.0).sqrt();
    BruteCommitMetrics {
        precision,
        recall,
        f1,
        far,
        d2h,
    }
}

/// Smallest `c` with `5c >= x`, i.e. the ceiling of 20% of `x`.
pub fn fifth_ceiling(x: usize) -> usize {
    (0..=x).find(|c| 5 * c >= x).unwrap()
}

pub struct BruteLineMetrics {
    pub top_k: f64,
    pub recall_20: f64,
    pub effort_20: f64,
    pub ifa: u32,
}

pub fn line_metrics(buggy: &[bool], k: usize) -> BruteLineMetrics {
    let n = buggy.len();
    let total = buggy.iter().filter(|&&b| b).count();
    let first = |r: usize| buggy.iter().take(r).filter(|&&b| b).count();
    let shown = k.min(n);
    let top_k = if shown == 0 { 0.0 } else { first(shown) as f64 / shown as f64 };
    let recall_20 = if total == 0 {
        0.0
    } else {
        first(fifth_ceiling(n)) as f64 / total as f64
    };
    let need = fifth_ceiling(total);
    let effort_20 = if n == 0 || total == 0 {
        0.0
    } else {
        (1..=n).find(|&r| first(r) >= need).unwrap() as f64 / n as f64
    };
    let ifa = (0..n).find(|&i| buggy[i]).unwrap_or(n) as u32;
    BruteLineMetrics {
        top_k,
        recall_20,
        effort_20,
        ifa,
    }
}

pub fn top_buggy_score(matches: &[CandidateMatch]) -> Option<f64> {
    matches
        .iter()
        .filter(|m| m.label.is_buggy())
        .map(|m| m.relevance_score)
        .fold(None, |acc, s| Some(acc.map_or(s, |a: f64| a.max(s))))
}

/// Twice the pair-counted AUC numerator of the hard threshold verdicts at `t`
/// (infinite `t` predicts everything clean), and the denominator.
pub fn threshold_auc(queries: &[(Vec<CandidateMatch>, Label)], t: f64) -> (u64, u64) {
    let verdicts: Vec<(f64, Label)> = queries
        .iter()
        .map(|(m, l)| {
            let buggy = top_buggy_score(m).is_some_and(|s| s > t);
            (if buggy { 1.0 } else { 0.0 }, *l)
        })
        .collect();
    pair_auc(&verdicts).expect("both classes present")
}

/// Every candidate threshold: 0, each distinct top-buggy score, and +inf.
pub fn sweep_candidates(queries: &[(Vec<CandidateMatch>, Label)]) -> Vec<f64> {
    let mut c: BTreeSet<u64> = queries.iter().filter_map(|(m, _)| top_buggy_score(m)).map(f64::to_bits).collect();
    c.insert(0f64.to_bits());
    c.insert(f64::INFINITY.to_bits());
    let mut v: Vec<f64> = c.into_iter().map(f64::from_bits).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Best achievable numerator over the full sweep, and the largest finite
/// candidate achieving it.
pub fn sweep_best(queries: &[(Vec<CandidateMatch>, Label)]) -> (u64, f64) {
    let cands = sweep_candidates(queries);
    let best = cands.iter().map(|&t| threshold_auc(queries, t).0).max().unwrap();
    let finite_max = cands
        .iter()
        .copied()
        .filter(|t| t.is_finite())
        .fold(0.0f64, f64::max);
    let t = cands
        .iter()
        .rev()
        .map(|&t| if t.is_finite() { t } else { finite_max })
        .find(|&t| threshold_auc(queries, t).0 == best)
        .unwrap();
    (best, t)
}
