//! Online inverted index over analyzed changes, scored with BM25.
//!
//! Each document has two fields, one per analyzer, both built from the
//! change's added lines. Documents are appended and get dense ids in insertion
//! order; nothing stored is ever rewritten, so an index built one document at
//! a time is identical to one built in a single batch.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzerKind;
use crate::corpus::{Change, Label};

/// Index fields are named after the analyzer that fills them.
pub type Field = AnalyzerKind;

const FIELD_COUNT: usize = 2;

fn slot(field: Field) -> usize {
    match field {
        AnalyzerKind::CamelCase => 0,
        AnalyzerKind::Shingle => 1,
    }
}

/// A field-qualified index term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub field: Field,
    pub text: String,
}

impl Term {
    pub fn new(field: Field, text: impl Into<String>) -> Self {
        Term {
            field,
            text: text.into(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.field {
            AnalyzerKind::CamelCase => "camelcase",
            AnalyzerKind::Shingle => "shingle",
        };
        write!(f, "{name}:{}", self.text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25 {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25 {
    fn default() -> Self {
        Bm25 { k1: 1.2, b: 0.75 }
    }
}

impl Bm25 {
    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`, never negative.
    pub fn idf(&self, doc_count: u64, df: u64) -> f64 {
        let n = doc_count as f64;
        let df = df as f64;
        libm::log(1.0 + (n - df + 0.5) / (df + 0.5))
    }

    pub fn tf_norm(&self, tf: u32, doc_len: u32, avgdl: f64) -> f64 {
        if tf == 0 {
            return 0.0;
        }
        let tf = f64::from(tf);
        let len_ratio = if avgdl > 0.0 { f64::from(doc_len) / avgdl } else { 0.0 };
        tf * (self.k1 + 1.0) / (tf + self.k1 * (1.0 - self.b + self.b * len_ratio))
    }
}

/// Term multiset of one field of one document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldData {
    pub terms: BTreeMap<String, u32>,
    pub length: u32,
}

impl FieldData {
    fn from_lines<S: AsRef<str>>(field: Field, lines: &[S]) -> Self {
        let mut data = FieldData::default();
        for line in lines {
            for term in field.terms(line.as_ref()) {
                *data.terms.entry(term).or_insert(0) += 1;
                data.length += 1;
            }
        }
        data
    }

    pub fn tf(&self, term: &str) -> u32 {
        self.terms.get(term).copied().unwrap_or(0)
    }
}

fn analyze_fields<S: AsRef<str>>(lines: &[S]) -> [FieldData; FIELD_COUNT] {
    AnalyzerKind::ALL.map(|f| FieldData::from_lines(f, lines))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedDocument {
    pub doc_id: u32,
    pub commit_hash: String,
    pub file_path: String,
    pub label: Label,
    pub author_ts: i64,
    /// Number of added lines the document was built from.
    pub line_count: u32,
    pub fields: [FieldData; FIELD_COUNT],
}

impl IndexedDocument {
    pub fn field(&self, field: Field) -> &FieldData {
        &self.fields[slot(field)]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostingList {
    /// `(doc_id, term_frequency)`, sorted by doc id.
    pub entries: Vec<(u32, u32)>,
}

impl PostingList {
    pub fn doc_freq(&self) -> u64 {
        self.entries.len() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusStats {
    pub doc_count: u64,
    pub total_tokens: [u64; FIELD_COUNT],
    pub avgdl: [f64; FIELD_COUNT],
}

impl CorpusStats {
    pub fn avgdl(&self, field: Field) -> f64 {
        self.avgdl[slot(field)]
    }

    pub fn total_tokens(&self, field: Field) -> u64 {
        self.total_tokens[slot(field)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    pub doc_id: u32,
    pub relevance_score: f64,
    pub label: Label,
    pub commit_hash: String,
    pub file_path: String,
    pub term_contributions: BTreeMap<Term, f64>,
}

/// Knobs of the more-like-this query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MltParams {
    /// Hits returned per query.
    pub top_k: usize,
    /// Query terms kept per field.
    pub max_query_terms: usize,
    pub min_term_freq: u32,
    pub min_doc_freq: u64,
}

impl Default for MltParams {
    fn default() -> Self {
        MltParams {
            top_k: 10,
            max_query_terms: 25,
            min_term_freq: 1,
            min_doc_freq: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexError {
    UnknownDocument(u32),
    /// The document shares no query term with the probe.
    NotMatched(u32),
    /// Stored postings or statistics disagree with the stored documents.
    Inconsistent(&'static str),
}

impl fmt::Display for IndexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexError::UnknownDocument(id) => write!(f, "no document with id {id}"),
            IndexError::NotMatched(id) => write!(f, "document {id} matches no query term"),
            IndexError::Inconsistent(what) => write!(f, "index is inconsistent: {what}"),
        }
    }
}

impl core::error::Error for IndexError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertedIndex {
    similarity: Bm25,
    docs: Vec<IndexedDocument>,
    postings: [BTreeMap<String, PostingList>; FIELD_COUNT],
    total_tokens: [u64; FIELD_COUNT],
}

impl Default for InvertedIndex {
    fn default() -> Self {
        InvertedIndex::new(Bm25::default())
    }
}

impl InvertedIndex {
    pub fn new(similarity: Bm25) -> Self {
        InvertedIndex {
            similarity,
            docs: Vec::new(),
            postings: [BTreeMap::new(), BTreeMap::new()],
            total_tokens: [0; FIELD_COUNT],
        }
    }

    /// Builds an index over `changes` in one pass: all postings are gathered,
    /// sorted and grouped rather than appended document by document.
    pub fn from_changes<'a, I>(similarity: Bm25, changes: I) -> Self
    where
        I: IntoIterator<Item = (&'a Change, i64)>,
    {
        let docs: Vec<IndexedDocument> = changes
            .into_iter()
            .enumerate()
            .map(|(i, (change, ts))| make_document(i as u32, change, ts))
            .collect();
        let (postings, total_tokens) = batch_postings(&docs);
        InvertedIndex {
            similarity,
            docs,
            postings,
            total_tokens,
        }
    }

    pub fn similarity(&self) -> Bm25 {
        self.similarity
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn documents(&self) -> &[IndexedDocument] {
        &self.docs
    }

    pub fn document(&self, doc_id: u32) -> Option<&IndexedDocument> {
        self.docs.get(doc_id as usize)
    }

    pub fn postings(&self, field: Field) -> &BTreeMap<String, PostingList> {
        &self.postings[slot(field)]
    }

    pub fn doc_freq(&self, field: Field, term: &str) -> u64 {
        self.postings[slot(field)]
            .get(term)
            .map_or(0, PostingList::doc_freq)
    }

    pub fn stats(&self) -> CorpusStats {
        let n = self.docs.len() as u64;
        let avgdl = self
            .total_tokens
            .map(|t| if n == 0 { 0.0 } else { t as f64 / n as f64 });
        CorpusStats {
            doc_count: n,
            total_tokens: self.total_tokens,
            avgdl,
        }
    }

    /// Appends a document built from the change's added lines. It is visible
    /// to every query issued afterwards.
    pub fn add_document(&mut self, change: &Change, author_ts: i64) -> u32 {
        let doc_id = self.docs.len() as u32;
        let doc = make_document(doc_id, change, author_ts);
        for field in AnalyzerKind::ALL {
            let s = slot(field);
            let data = doc.field(field);
            self.total_tokens[s] += u64::from(data.length);
            for (term, &tf) in &data.terms {
                match self.postings[s].get_mut(term.as_str()) {
                    Some(list) => list.entries.push((doc_id, tf)),
                    None => {
                        self.postings[s].insert(
                            term.clone(),
                            PostingList {
                                entries: vec![(doc_id, tf)],
                            },
                        );
                    }
                }
            }
        }
        self.docs.push(doc);
        doc_id
    }

    /// Checks postings and statistics against the stored documents.
    pub fn validate(&self) -> Result<(), IndexError> {
        if self
            .docs
            .iter()
            .enumerate()
            .any(|(i, d)| d.doc_id as usize != i)
        {
            return Err(IndexError::Inconsistent("document ids are not dense"));
        }
        if self.docs.iter().any(|d| {
            d.fields
                .iter()
                .any(|f| f.terms.values().sum::<u32>() != f.length || f.terms.values().any(|&v| v == 0))
        }) {
            return Err(IndexError::Inconsistent("field length"));
        }
        let (postings, totals) = batch_postings(&self.docs);
        if totals != self.total_tokens {
            return Err(IndexError::Inconsistent("token totals"));
        }
        if postings != self.postings {
            return Err(IndexError::Inconsistent("postings"));
        }
        Ok(())
    }

    fn term_weight(&self, field: Field, doc: &IndexedDocument, tf: u32, df: u64, stats: &CorpusStats) -> f64 {
        let idf = self.similarity.idf(stats.doc_count, df);
        idf * self
            .similarity
            .tf_norm(tf, doc.field(field).length, stats.avgdl(field))
    }

    /// Per-term BM25 contributions of `query` against one document. Terms
    /// absent from the document are left out.
    pub fn score_terms(&self, query: &[Term], doc_id: u32) -> Result<BTreeMap<Term, f64>, IndexError> {
        let doc = self
            .document(doc_id)
            .ok_or(IndexError::UnknownDocument(doc_id))?;
        let stats = self.stats();
        let mut out = BTreeMap::new();
        for term in query {
            let tf = doc.field(term.field).tf(&term.text);
            if tf == 0 {
                continue;
            }
            let df = self.doc_freq(term.field, &term.text);
            *out.entry(term.clone()).or_insert(0.0) += self.term_weight(term.field, doc, tf, df, &stats);
        }
        Ok(out)
    }

    /// BM25 relevance of one document for a list of field-qualified terms.
    pub fn bm25_score(&self, query: &[Term], doc_id: u32) -> Result<f64, IndexError> {
        let doc = self
            .document(doc_id)
            .ok_or(IndexError::UnknownDocument(doc_id))?;
        let stats = self.stats();
        Ok(query
            .iter()
            .map(|term| {
                let tf = doc.field(term.field).tf(&term.text);
                let df = self.doc_freq(term.field, &term.text);
                self.term_weight(term.field, doc, tf, df, &stats)
            })
            .sum())
    }

    /// Selects the more-like-this query terms for a probe: per field, terms
    /// ranked by probe frequency times idf, at most `max_query_terms` each.
    /// The result is sorted by term.
    pub fn query_terms<S: AsRef<str>>(&self, probe_lines: &[S], params: &MltParams) -> Vec<Term> {
        let n = self.docs.len() as u64;
        let min_df = params.min_doc_freq.max(1);
        let mut selected = Vec::new();
        for (field, data) in AnalyzerKind::ALL.into_iter().zip(analyze_fields(probe_lines)) {
            let mut ranked: Vec<(f64, String)> = data
                .terms
                .into_iter()
                .filter(|(_, tf)| *tf >= params.min_term_freq)
                .filter_map(|(text, tf)| {
                    let df = self.doc_freq(field, &text);
                    (df >= min_df).then(|| (f64::from(tf) * self.similarity.idf(n, df), text))
                })
                .collect();
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
            ranked.truncate(params.max_query_terms);
            selected.extend(ranked.into_iter().map(|(_, text)| Term { field, text }));
        }
        selected.sort();
        selected
    }

    pub fn mlt_query<S: AsRef<str>>(&self, probe_lines: &[S], params: &MltParams) -> Vec<SearchHit> {
        self.mlt_query_filtered(probe_lines, params, |_| true)
    }

    /// More-like-this query restricted to documents accepted by `keep`.
    /// Hits come back by descending score, ties by ascending doc id.
    pub fn mlt_query_filtered<S, F>(&self, probe_lines: &[S], params: &MltParams, keep: F) -> Vec<SearchHit>
    where
        S: AsRef<str>,
        F: Fn(&IndexedDocument) -> bool,
    {
        if self.docs.is_empty() || params.top_k == 0 {
            return Vec::new();
        }
        let query = self.query_terms(probe_lines, params);
        let stats = self.stats();
        let mut scores = vec![0.0f64; self.docs.len()];
        let mut matched = vec![false; self.docs.len()];
        for term in &query {
            let Some(list) = self.postings[slot(term.field)].get(&term.text) else {
                continue;
            };
            let df = list.doc_freq();
            for &(doc_id, tf) in &list.entries {
                let doc = &self.docs[doc_id as usize];
                scores[doc_id as usize] += self.term_weight(term.field, doc, tf, df, &stats);
                matched[doc_id as usize] = true;
            }
        }

        let mut ranked: Vec<(f64, u32)> = matched
            .iter()
            .enumerate()
            .filter(|&(i, &m)| m && keep(&self.docs[i]))
            .map(|(i, _)| (scores[i], i as u32))
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        ranked.truncate(params.top_k);

        ranked
            .into_iter()
            .map(|(_, doc_id)| {
                let doc = &self.docs[doc_id as usize];
                let contributions = self
                    .score_terms(&query, doc_id)
                    .unwrap_or_default();
                SearchHit {
                    doc_id,
                    relevance_score: contributions.values().sum(),
                    label: doc.label,
                    commit_hash: doc.commit_hash.clone(),
                    file_path: doc.file_path.clone(),
                    term_contributions: contributions,
                }
            })
            .collect()
    }

    /// Per-term contributions behind the score of `doc_id` for this probe.
    pub fn explain<S: AsRef<str>>(
        &self,
        probe_lines: &[S],
        doc_id: u32,
        params: &MltParams,
    ) -> Result<BTreeMap<Term, f64>, IndexError> {
        let query = self.query_terms(probe_lines, params);
        let contributions = self.score_terms(&query, doc_id)?;
        if contributions.is_empty() {
            return Err(IndexError::NotMatched(doc_id));
        }
        Ok(contributions)
    }
}

fn make_document(doc_id: u32, change: &Change, author_ts: i64) -> IndexedDocument {
    IndexedDocument {
        doc_id,
        commit_hash: change.commit_hash.clone(),
        file_path: change.file_path.clone(),
        label: change.label,
        author_ts,
        line_count: change.lines_added.len() as u32,
        fields: analyze_fields(&change.lines_added),
    }
}

type Postings = [BTreeMap<String, PostingList>; FIELD_COUNT];

fn batch_postings(docs: &[IndexedDocument]) -> (Postings, [u64; FIELD_COUNT]) {
    let mut postings: Postings = [BTreeMap::new(), BTreeMap::new()];
    let mut totals = [0u64; FIELD_COUNT];
    for field in AnalyzerKind::ALL {
        let s = slot(field);
        let mut triples: Vec<(&str, u32, u32)> = Vec::new();
        for doc in docs {
            let data = doc.field(field);
            totals[s] += u64::from(data.length);
            triples.extend(data.terms.iter().map(|(t, &tf)| (t.as_str(), doc.doc_id, tf)));
        }
        triples.sort_unstable_by(|a, b| match a.0.cmp(b.0) {
            Ordering::Equal => a.1.cmp(&b.1),
            o => o,
        });
        for chunk in triples.chunk_by(|a, b| a.0 == b.0) {
            postings[s].insert(
                String::from(chunk[0].0),
                PostingList {
                    entries: chunk.iter().map(|&(_, d, tf)| (d, tf)).collect(),
                },
            );
        }
    }
    (postings, totals)
}
