//! Ranking the added lines of a predicted-buggy commit.
//!
//! The highest-weighted terms of a buggy match's score explanation become
//! buggy tokens; each line is scored by how many of them its own analysis
//! contains.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzerKind;
use crate::index::Term;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuggyTokenSet {
    /// `(term, weight)` by descending weight.
    pub tokens: Vec<(String, f64)>,
    pub source_doc_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedLine {
    pub file_path: String,
    pub line_text: String,
    /// 1-based position among the commit's added lines.
    pub position: u32,
    pub occurrence_count: u32,
    /// 1-based.
    pub rank: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyExplanation;

impl fmt::Display for EmptyExplanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("explanation has no contributing terms")
    }
}

impl core::error::Error for EmptyExplanation {}

/// How a line's score is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Counting {
    /// Distinct buggy tokens present in the line.
    #[default]
    Distinct,
    /// Every occurrence of every buggy token.
    Repetitions,
}

/// Where buggy tokens are taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenSource {
    /// The single highest-scoring buggy match.
    #[default]
    TopBuggy,
    /// All buggy matches, keeping each term's largest weight.
    Union,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LineRankConfig {
    pub top_m: usize,
    pub counting: Counting,
    pub source: TokenSource,
}

impl Default for LineRankConfig {
    fn default() -> Self {
        LineRankConfig {
            top_m: 20,
            counting: Counting::Distinct,
            source: TokenSource::TopBuggy,
        }
    }
}

/// Collapses field-qualified contributions onto term text, summing a text's
/// weight over both fields.
pub fn merge_fields(explanation: &BTreeMap<Term, f64>) -> BTreeMap<String, f64> {
    let mut merged: BTreeMap<String, f64> = BTreeMap::new();
    for (term, &w) in explanation {
        *merged.entry(term.text.clone()).or_insert(0.0) += w;
    }
    merged
}

/// The `top_m` heaviest terms. Equal weights at the cut are ordered by term.
pub fn extract_buggy_tokens(
    explanation: &BTreeMap<String, f64>,
    top_m: usize,
    source_doc_id: u32,
) -> Result<BuggyTokenSet, EmptyExplanation> {
    if explanation.is_empty() {
        return Err(EmptyExplanation);
    }
    let mut tokens: Vec<(String, f64)> = explanation
        .iter()
        .map(|(t, &w)| (t.clone(), w.max(0.0)))
        .collect();
    tokens.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    tokens.truncate(top_m);
    Ok(BuggyTokenSet {
        tokens,
        source_doc_id,
    })
}

fn line_terms(line: &str) -> Vec<String> {
    AnalyzerKind::ALL
        .into_iter()
        .flat_map(|kind| kind.terms(line))
        .collect()
}

fn count_hits(line: &str, tokens: &BTreeSet<&str>, counting: Counting) -> u32 {
    let terms = line_terms(line);
    match counting {
        Counting::Distinct => {
            let present: BTreeSet<&str> = terms
                .iter()
                .map(String::as_str)
                .filter(|t| tokens.contains(t))
                .collect();
            present.len() as u32
        }
        Counting::Repetitions => terms.iter().filter(|t| tokens.contains(t.as_str())).count() as u32,
    }
}

/// Orders `(file_path, line_text)` pairs by buggy-token hits, descending.
/// Lines with equal counts keep their input order.
pub fn rank_lines(
    commit_lines: &[(String, String)],
    tokens: &BuggyTokenSet,
    counting: Counting,
) -> Vec<RankedLine> {
    let wanted: BTreeSet<&str> = tokens.tokens.iter().map(|(t, _)| t.as_str()).collect();
    let mut lines: Vec<RankedLine> = commit_lines
        .iter()
        .enumerate()
        .map(|(i, (path, text))| RankedLine {
            file_path: path.clone(),
            line_text: text.clone(),
            position: i as u32 + 1,
            occurrence_count: count_hits(text, &wanted, counting),
            rank: 0,
        })
        .collect();
    lines.sort_by_key(|l| core::cmp::Reverse(l.occurrence_count));
    for (i, line) in lines.iter_mut().enumerate() {
        line.rank = i as u32 + 1;
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn token_set(terms: &[&str]) -> BuggyTokenSet {
        BuggyTokenSet {
            tokens: terms.iter().map(|t| (t.to_string(), 1.0)).collect(),
            source_doc_id: 0,
        }
    }

    fn lines(v: &[&str]) -> Vec<(String, String)> {
        v.iter().map(|l| ("a.py".to_string(), l.to_string())).collect()
    }

    fn weights(v: &[(&str, f64)]) -> BTreeMap<String, f64> {
        v.iter().map(|(t, w)| (t.to_string(), *w)).collect()
    }

    #[test]
    fn single_term_explanation() {
        let set = extract_buggy_tokens(&weights(&[("foo", 2.5)]), 20, 7).unwrap();
        assert_eq!(set.tokens, vec![("foo".to_string(), 2.5)]);
        assert_eq!(set.source_doc_id, 7);
        assert_eq!(extract_buggy_tokens(&BTreeMap::new(), 20, 0), Err(EmptyExplanation));
    }

    #[test]
    fn keeps_heaviest_terms() {
        let ex: BTreeMap<String, f64> = (0..30).map(|i| (alloc::format!("t{i:02}"), i as f64)).collect();
        let set = extract_buggy_tokens(&ex, 20, 0).unwrap();
        assert_eq!(set.tokens.len(), 20);
        assert_eq!(set.tokens[0].0, "t29");
        assert_eq!(set.tokens[19].0, "t10");
    }

    #[test]
    fn ties_at_cut_broken_by_term() {
        let ex = weights(&[("zeta", 1.0), ("alpha", 1.0), ("mid", 1.0), ("top", 5.0)]);
        let set = extract_buggy_tokens(&ex, 3, 0).unwrap();
        let names: Vec<&str> = set.tokens.iter().map(|(t, _)| t.as_str()).collect();
        assert_eq!(names, vec!["top", "alpha", "mid"]);
    }

    #[test]
    fn ranks_by_distinct_hits() {
        let ranked = rank_lines(&lines(&["foo(bar)", "baz()", "foo = 1"]), &token_set(&["foo", "bar"]), Counting::Distinct);
        let counts: Vec<u32> = ranked.iter().map(|l| l.occurrence_count).collect();
        assert_eq!(counts, vec![2, 1, 0]);
        let by_position: Vec<u32> = {
            let mut v: Vec<(u32, u32)> = ranked.iter().map(|l| (l.position, l.rank)).collect();
            v.sort();
            v.into_iter().map(|(_, r)| r).collect()
        };
        assert_eq!(by_position, vec![1, 3, 2]);
    }

    #[test]
    fn no_hits_keeps_order() {
        let ranked = rank_lines(&lines(&["a", "b", "c"]), &token_set(&["zzz"]), Counting::Distinct);
        let positions: Vec<u32> = ranked.iter().map(|l| l.position).collect();
        assert_eq!(positions, vec![1, 2, 3]);
        assert!(ranked.iter().all(|l| l.occurrence_count == 0));
        let single = rank_lines(&lines(&["x"]), &token_set(&["zzz"]), Counting::Distinct);
        assert_eq!(single[0].rank, 1);
    }

    #[test]
    fn repetitions_mode_counts_every_occurrence() {
        let set = token_set(&["foo"]);
        let distinct = rank_lines(&lines(&["foo foo foo", "foo bar"]), &set, Counting::Distinct);
        assert_eq!(distinct[0].occurrence_count, 1);
        let reps = rank_lines(&lines(&["foo foo foo", "foo bar"]), &set, Counting::Repetitions);
        assert_eq!(reps[0].occurrence_count, 3);
        assert_eq!(reps[0].position, 1);
    }

    #[test]
    fn shingle_tokens_match_lines() {
        let set = token_set(&["x=y+"]);
        let ranked = rank_lines(&lines(&["a = b", "x = y + 1"]), &set, Counting::Distinct);
        assert_eq!(ranked[0].position, 2);
        assert_eq!(ranked[0].occurrence_count, 1);
    }

    #[test]
    fn field_merge_sums_text() {
        use crate::index::Field;
        let mut ex = BTreeMap::new();
        ex.insert(Term::new(Field::CamelCase, "abcd"), 1.0);
        ex.insert(Term::new(Field::Shingle, "abcd"), 2.0);
        ex.insert(Term::new(Field::Shingle, "xy"), 0.5);
        assert_eq!(merge_fields(&ex), weights(&[("abcd", 3.0), ("xy", 0.5)]));
    }

    proptest::proptest! {
        #[test]
        fn unmatched_token_does_not_change_ranking(
            raw in proptest::collection::vec("[a-d =()+]{0,12}", 1..10),
            picks in proptest::collection::vec("[a-d]", 1..4),
        ) {
            let commit = lines(&raw.iter().map(String::as_str).collect::<Vec<_>>());
            let base = token_set(&picks.iter().map(String::as_str).collect::<Vec<_>>());
            let mut extended = base.clone();
            extended.tokens.push(("QQQ_not_present".to_string(), 0.1));
            let a = rank_lines(&commit, &base, Counting::Distinct);
            let b = rank_lines(&commit, &extended, Counting::Distinct);
            proptest::prop_assert_eq!(&a, &b);
            let mut ranks: Vec<u32> = a.iter().map(|l| l.rank).collect();
            ranks.sort();
            proptest::prop_assert_eq!(ranks, (1..=a.len() as u32).collect::<Vec<_>>());
            proptest::prop_assert!(a.windows(2).all(|w| w[0].occurrence_count >= w[1].occurrence_count));
            proptest::prop_assert!(a.windows(2).all(|w| w[0].occurrence_count > w[1].occurrence_count || w[0].position < w[1].position));
        }
    }
}
