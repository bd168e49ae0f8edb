//! Commits, per-file changes and the flat document form they are stored in.

mod diff;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

pub use diff::{parse_unified_diff, DiffError, FileDiff};

/// Ground-truth (or predicted) class of a commit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Buggy,
    Clean,
}

impl Label {
    pub fn is_buggy(self) -> bool {
        self == Label::Buggy
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Buggy => "buggy",
            Label::Clean => "clean",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "buggy" => Ok(Label::Buggy),
            "clean" => Ok(Label::Clean),
            other => Err(CorpusError::InvalidLabel(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    InvalidLabel(String),
    /// Documents of one commit disagree on label or timestamp.
    InconsistentCommit { commit_hash: String, field: &'static str },
    DuplicateDocument { commit_hash: String, file_path: String },
    EmptyHash,
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::InvalidLabel(s) => {
                write!(f, "invalid label {s:?}, expected \"buggy\" or \"clean\"")
            }
            CorpusError::InconsistentCommit { commit_hash, field } => {
                write!(f, "documents of commit {commit_hash} disagree on {field}")
            }
            CorpusError::DuplicateDocument { commit_hash, file_path } => {
                write!(f, "duplicate document for {commit_hash}:{file_path}")
            }
            CorpusError::EmptyHash => f.write_str("empty commit hash"),
        }
    }
}

impl core::error::Error for CorpusError {}

/// A contiguous block of added and deleted lines inside one file's diff.
/// Line numbers are 1-based and refer to the new file for `added` and the old
/// file for `deleted`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hunk {
    pub added: Vec<(u32, String)>,
    pub deleted: Vec<(u32, String)>,
}

/// The modifications one commit makes to one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Change {
    pub commit_hash: String,
    pub file_path: String,
    pub lines_added: Vec<String>,
    pub lines_deleted: Vec<String>,
    pub label: Label,
    /// 0-based indices into `lines_added` of lines known to be buggy. Only
    /// present when line-level ground truth is available.
    pub buggy_lines: Vec<u32>,
}

impl Change {
    pub fn new(
        commit_hash: impl Into<String>,
        file_path: impl Into<String>,
        lines_added: Vec<String>,
        lines_deleted: Vec<String>,
        label: Label,
    ) -> Self {
        Change {
            commit_hash: commit_hash.into(),
            file_path: file_path.into(),
            lines_added,
            lines_deleted,
            label,
            buggy_lines: Vec::new(),
        }
    }

    /// Builds a change from parsed hunks, concatenating their payload lines.
    pub fn from_hunks(
        commit_hash: impl Into<String>,
        file_path: impl Into<String>,
        hunks: &[Hunk],
        label: Label,
    ) -> Self {
        let lines_added = hunks
            .iter()
            .flat_map(|h| h.added.iter().map(|(_, t)| t.clone()))
            .collect();
        let lines_deleted = hunks
            .iter()
            .flat_map(|h| h.deleted.iter().map(|(_, t)| t.clone()))
            .collect();
        Change::new(commit_hash, file_path, lines_added, lines_deleted, label)
    }
}

pub fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

/// Removes blank lines from both line lists, keeping order. Buggy-line
/// indices are remapped onto the surviving lines.
pub fn preprocess_change(change: Change) -> Change {
    let Change {
        commit_hash,
        file_path,
        lines_added,
        lines_deleted,
        label,
        buggy_lines,
    } = change;

    let mut remap = Vec::with_capacity(lines_added.len());
    let mut kept = Vec::with_capacity(lines_added.len());
    for line in lines_added {
        if is_blank(&line) {
            remap.push(None);
        } else {
            remap.push(Some(kept.len() as u32));
            kept.push(line);
        }
    }
    let mut buggy: Vec<u32> = buggy_lines
        .into_iter()
        .filter_map(|i| remap.get(i as usize).copied().flatten())
        .collect();
    buggy.sort_unstable();
    buggy.dedup();

    Change {
        commit_hash,
        file_path,
        lines_added: kept,
        lines_deleted: lines_deleted.into_iter().filter(|l| !is_blank(l)).collect(),
        label,
        buggy_lines: buggy,
    }
}

/// A labeled commit with its per-file changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub hash: String,
    pub author_ts: i64,
    pub label: Label,
    pub changes: Vec<Change>,
}

impl Commit {
    pub fn new(hash: impl Into<String>, author_ts: i64, label: Label, changes: Vec<Change>) -> Self {
        let mut commit = Commit {
            hash: hash.into(),
            author_ts,
            label,
            changes,
        };
        commit.set_label(label);
        commit
    }

    /// Number of added lines across all changes.
    pub fn la(&self) -> u64 {
        self.changes.iter().map(|c| c.lines_added.len() as u64).sum()
    }

    /// Sets the label on the commit and every change it owns.
    pub fn set_label(&mut self, label: Label) {
        self.label = label;
        for change in &mut self.changes {
            change.label = label;
            change.commit_hash.clone_from(&self.hash);
        }
    }

    /// Whether any change carries line-level ground truth.
    pub fn has_line_labels(&self) -> bool {
        self.changes.iter().any(|c| !c.buggy_lines.is_empty())
    }

    pub fn to_documents(&self) -> Vec<CorpusDocument> {
        self.changes
            .iter()
            .map(|c| CorpusDocument {
                commit_hash: self.hash.clone(),
                file_path: c.file_path.clone(),
                lines_added: c.lines_added.clone(),
                lines_deleted: c.lines_deleted.clone(),
                label: self.label,
                author_ts: self.author_ts,
                buggy_lines: c.buggy_lines.clone(),
            })
            .collect()
    }
}

/// One file-level change of one commit in its stored, flat form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub commit_hash: String,
    pub file_path: String,
    pub lines_added: Vec<String>,
    pub lines_deleted: Vec<String>,
    pub label: Label,
    pub author_ts: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub buggy_lines: Vec<u32>,
}

impl CorpusDocument {
    pub fn to_change(&self) -> Change {
        Change {
            commit_hash: self.commit_hash.clone(),
            file_path: self.file_path.clone(),
            lines_added: self.lines_added.clone(),
            lines_deleted: self.lines_deleted.clone(),
            label: self.label,
            buggy_lines: self.buggy_lines.clone(),
        }
    }
}

/// Groups documents back into commits, ordered by author timestamp (stable
/// with respect to first appearance).
pub fn commits_from_documents(docs: &[CorpusDocument]) -> Result<Vec<Commit>, CorpusError> {
    let mut order: Vec<Commit> = Vec::new();
    let mut by_hash: BTreeMap<&str, usize> = BTreeMap::new();
    let mut seen: BTreeMap<(&str, &str), ()> = BTreeMap::new();

    for doc in docs {
        if doc.commit_hash.is_empty() {
            return Err(CorpusError::EmptyHash);
        }
        if seen
            .insert((doc.commit_hash.as_str(), doc.file_path.as_str()), ())
            .is_some()
        {
            return Err(CorpusError::DuplicateDocument {
                commit_hash: doc.commit_hash.clone(),
                file_path: doc.file_path.clone(),
            });
        }
        match by_hash.get(doc.commit_hash.as_str()) {
            Some(&i) => {
                let commit = &mut order[i];
                if commit.label != doc.label {
                    return Err(CorpusError::InconsistentCommit {
                        commit_hash: doc.commit_hash.clone(),
                        field: "label",
                    });
                }
                if commit.author_ts != doc.author_ts {
                    return Err(CorpusError::InconsistentCommit {
                        commit_hash: doc.commit_hash.clone(),
                        field: "author_ts",
                    });
                }
                commit.changes.push(doc.to_change());
            }
            None => {
                by_hash.insert(doc.commit_hash.as_str(), order.len());
                order.push(Commit {
                    hash: doc.commit_hash.clone(),
                    author_ts: doc.author_ts,
                    label: doc.label,
                    changes: alloc::vec![doc.to_change()],
                });
            }
        }
    }
    order.sort_by_key(|c| c.author_ts);
    Ok(order)
}

pub fn documents_from_commits(commits: &[Commit]) -> Vec<CorpusDocument> {
    commits.iter().flat_map(Commit::to_documents).collect()
}
