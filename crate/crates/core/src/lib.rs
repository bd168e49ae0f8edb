//! Retrieval-based just-in-time defect prediction.
//!
//! Past source-code changes are indexed with two code analyzers (camel-case
//! splitting and 4-token shingles) and scored with BM25. An incoming commit is
//! turned into more-like-this queries, the retrieved past changes become its
//! candidate matches, and small classifiers (KNN, score threshold, a one-feature
//! logistic model on lines added, and their ensembles) decide buggy or clean.
//! Predicted-buggy commits get their added lines ranked by how many of the
//! highest-weighted matching terms they contain.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, git access and
//! the command line live in the `bugmatch` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod classify;
pub mod corpus;
pub mod eval;
pub mod index;
pub mod linerank;
pub mod pipeline;

pub use analysis::{analyze_camelcase, analyze_shingle, code_tokenize, AnalyzerKind, Token};
pub use classify::{
    CandidateMatch, ClassifierConfig, LaModel, Member, Prediction, ThresholdConfig,
    ThresholdSetting,
};
pub use corpus::{Change, Commit, CorpusDocument, CorpusError, Hunk, Label};
pub use eval::{EvalConfig, EvalMode, MetricReport, PeriodReport, PeriodSplit};
pub use index::{Field, InvertedIndex, MltParams, SearchHit, Term};
pub use linerank::{BuggyTokenSet, RankedLine};
