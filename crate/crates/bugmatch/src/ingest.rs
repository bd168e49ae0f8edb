//! Commit extraction through the `git` command-line tool.

use std::collections::{BTreeMap, HashSet};
use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use bugmatch_core::corpus::{parse_unified_diff, preprocess_change, DiffError};
use bugmatch_core::{Change, Commit, Label};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepoSource {
    pub repo_path: PathBuf,
    /// Branch or any other revision; `HEAD` when unset.
    pub branch: Option<String>,
    pub since_ts: Option<i64>,
    pub until_ts: Option<i64>,
}

impl RepoSource {
    pub fn new(repo_path: impl Into<PathBuf>) -> Self {
        RepoSource {
            repo_path: repo_path.into(),
            branch: None,
            since_ts: None,
            until_ts: None,
        }
    }

    fn revision(&self) -> &str {
        self.branch.as_deref().unwrap_or("HEAD")
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("could not run git: {0}")]
    Spawn(#[source] std::io::Error),
    #[error("`git {args}` failed: {stderr}")]
    Git { args: String, stderr: String },
    #[error("{0}: not a git repository")]
    NotARepository(PathBuf),
    #[error("unknown commit {0}")]
    UnknownCommit(String),
    #[error("commit {hash}: {source}")]
    Diff {
        hash: String,
        #[source]
        source: DiffError,
    },
    #[error("unexpected git output: {0}")]
    Output(String),
}

fn git<I, S>(repo: &Path, args: I) -> Result<std::process::Output, IngestError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .env("LC_ALL", "C")
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .stdin(Stdio::null())
        .output()
        .map_err(IngestError::Spawn)
}

fn git_ok(repo: &Path, args: &[&str]) -> Result<String, IngestError> {
    let out = git(repo, args)?;
    if !out.status.success() {
        return Err(IngestError::Git {
            args: args.join(" "),
            stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
        });
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn resolves(repo: &Path, rev: &str) -> Result<bool, IngestError> {
    let spec = format!("{rev}^{{commit}}");
    Ok(git(repo, ["rev-parse", "--verify", "--quiet", spec.as_str()])?
        .status
        .success())
}

fn check_repository(repo: &Path) -> Result<(), IngestError> {
    if !repo.is_dir() || !git(repo, ["rev-parse", "--git-dir"])?.status.success() {
        return Err(IngestError::NotARepository(repo.to_path_buf()));
    }
    Ok(())
}

/// `(hash, author_ts)` of every commit reachable from the source revision,
/// oldest first. Equal timestamps keep git's topological order.
pub fn enumerate_commits(source: &RepoSource) -> Result<Vec<(String, i64)>, IngestError> {
    let repo = &source.repo_path;
    check_repository(repo)?;
    let rev = source.revision();
    if !resolves(repo, rev)? {
        // an unborn HEAD is an empty history; a named branch must exist
        if source.branch.is_none() {
            return Ok(Vec::new());
        }
        return Err(IngestError::UnknownCommit(rev.to_string()));
    }
    let log = git_ok(repo, &["log", "--topo-order", "--reverse", "--format=%H %at", rev, "--"])?;
    let mut commits = Vec::new();
    for line in log.lines().filter(|l| !l.is_empty()) {
        let (hash, ts) = line
            .split_once(' ')
            .ok_or_else(|| IngestError::Output(line.to_string()))?;
        let ts: i64 = ts.parse().map_err(|_| IngestError::Output(line.to_string()))?;
        if source.since_ts.is_some_and(|s| ts < s) || source.until_ts.is_some_and(|u| ts >= u) {
            continue;
        }
        commits.push((hash.to_string(), ts));
    }
    commits.sort_by_key(|&(_, ts)| ts);
    Ok(commits)
}

fn empty_tree(repo: &Path) -> Result<String, IngestError> {
    Ok(git_ok(repo, &["hash-object", "-t", "tree", "/dev/null"])?
        .trim()
        .to_string())
}

/// Diffs `hash` against its first parent (the empty tree for a root commit)
/// and returns an unlabeled commit; `label` is clean.
pub fn extract_commit(source: &RepoSource, hash: &str) -> Result<Commit, IngestError> {
    let repo = &source.repo_path;
    if !resolves(repo, hash)? {
        return Err(IngestError::UnknownCommit(hash.to_string()));
    }
    let meta = git_ok(repo, &["rev-list", "--parents", "-n", "1", "--format=%at", hash, "--"])?;
    // "commit <hash> <parents...>\n<author ts>\n"
    let mut lines = meta.lines();
    let header = lines.next().unwrap_or_default();
    let mut ids = header.split_whitespace().skip(1);
    let full_hash = ids
        .next()
        .ok_or_else(|| IngestError::Output(header.to_string()))?
        .to_string();
    let parent = match ids.next() {
        Some(p) => p.to_string(),
        None => empty_tree(repo)?,
    };
    let author_ts: i64 = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| IngestError::Output(meta.clone()))?;

    let diff = git_ok(
        repo,
        &[
            "-c",
            "core.quotepath=false",
            "diff",
            "-M",
            "-U0",
            "--no-color",
            "--no-ext-diff",
            "--no-textconv",
            "--src-prefix=a/",
            "--dst-prefix=b/",
            &parent,
            &full_hash,
            "--",
        ],
    )?;
    let files = parse_unified_diff(&diff).map_err(|source| IngestError::Diff {
        hash: full_hash.clone(),
        source,
    })?;
    let changes: Vec<Change> = files
        .into_iter()
        .map(|f| preprocess_change(Change::from_hunks(full_hash.clone(), f.path, &f.hunks, Label::Clean)))
        .collect();
    Ok(Commit::new(full_hash, author_ts, Label::Clean, changes))
}

/// Every commit of the source, oldest first, unlabeled.
pub fn ingest_repository(source: &RepoSource) -> Result<Vec<Commit>, IngestError> {
    enumerate_commits(source)?
        .into_iter()
        .map(|(hash, _)| extract_commit(source, &hash))
        .collect()
}

/// Marks commits listed as buggy; everything else is clean. Listed hashes
/// that match no commit are reported and ignored.
pub fn attach_labels(mut commits: Vec<Commit>, labels: &BTreeMap<String, Label>) -> Vec<Commit> {
    let known: HashSet<&str> = commits.iter().map(|c| c.hash.as_str()).collect();
    for hash in labels.keys().filter(|h| !known.contains(h.as_str())) {
        log::warn!("label file lists {hash}, which is not in the repository history");
    }
    for commit in &mut commits {
        let label = labels.get(&commit.hash).copied().unwrap_or(Label::Clean);
        commit.set_label(label);
    }
    commits
}
