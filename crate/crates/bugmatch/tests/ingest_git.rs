mod common;

use std::collections::BTreeMap;

use bugmatch::ingest::{attach_labels, enumerate_commits, extract_commit, ingest_repository, IngestError, RepoSource};
use bugmatch::io;
use bugmatch_core::corpus::{documents_from_commits, parse_unified_diff};
use bugmatch_core::Label;
use common::{run, stderr, tmp_file, Repo};

const T0: i64 = 1_600_000_000;

fn three_commits() -> (Repo, Vec<String>) {
    let repo = Repo::new();
    let mut hashes = Vec::new();
    for i in 0..3 {
        repo.write(&format!("f{i}.txt"), format!("line {i}\n").as_bytes());
        hashes.push(repo.commit(&format!("c{i}"), T0 + i * 100));
    }
    (repo, hashes)
}

#[test]
fn empty_repository_has_no_commits() {
    let repo = Repo::new();
    assert!(enumerate_commits(&RepoSource::new(repo.path())).unwrap().is_empty());
}

#[test]
fn sequential_commits_in_order() {
    let (repo, hashes) = three_commits();
    let listed = enumerate_commits(&RepoSource::new(repo.path())).unwrap();
    let got: Vec<&str> = listed.iter().map(|(h, _)| h.as_str()).collect();
    assert_eq!(got, hashes.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(listed[1].1, T0 + 100);

    let since = RepoSource {
        since_ts: Some(T0 + 1),
        ..RepoSource::new(repo.path())
    };
    assert_eq!(enumerate_commits(&since).unwrap().len(), 2);
    let until = RepoSource {
        until_ts: Some(T0 + 200),
        ..RepoSource::new(repo.path())
    };
    assert_eq!(enumerate_commits(&until).unwrap().len(), 2);
}

#[test]
fn history_sorted_by_author_time() {
    let repo = Repo::new();
    repo.write("a", b"a\n");
    let late = repo.commit("late", T0 + 500);
    repo.write("b", b"b\n");
    let early = repo.commit("early", T0);
    let listed = enumerate_commits(&RepoSource::new(repo.path())).unwrap();
    assert_eq!(listed[0].0, early);
    assert_eq!(listed[1].0, late);
}

#[test]
fn added_lines_counted_without_blanks() {
    let repo = Repo::new();
    repo.write("src/main.py", b"x = 1\n\n   \ny = 2\n");
    let h = repo.commit("root", T0);
    let c = extract_commit(&RepoSource::new(repo.path()), &h).unwrap();
    assert_eq!(c.la(), 2);
    assert_eq!(c.changes[0].file_path, "src/main.py");
    assert_eq!(c.changes[0].lines_added, ["x = 1", "y = 2"]);
    assert_eq!(c.hash.len(), 40);
    assert_eq!(c.author_ts, T0);
}

#[test]
fn modifications_and_deletions() {
    let repo = Repo::new();
    repo.write("a.c", b"int a = 0;\nint b = 1;\nint c = 2;\n");
    repo.commit("root", T0);
    repo.write("a.c", b"int a = 0;\nint b = 5;\nint c = 2;\nint d = 3;\n");
    let h = repo.commit("edit", T0 + 10);
    let c = extract_commit(&RepoSource::new(repo.path()), &h).unwrap();
    assert_eq!(c.changes.len(), 1);
    assert_eq!(c.changes[0].lines_added, ["int b = 5;", "int d = 3;"]);
    assert_eq!(c.changes[0].lines_deleted, ["int b = 1;"]);
}

#[test]
fn merge_diffs_against_first_parent() {
    let repo = Repo::new();
    repo.write("base.txt", b"base\n");
    repo.commit("root", T0);
    repo.git(&["checkout", "-q", "-b", "side"], None);
    repo.write("side.txt", b"from side\n");
    repo.commit("side", T0 + 10);
    repo.git(&["checkout", "-q", "main"], None);
    repo.write("main.txt", b"from main\n");
    repo.commit("main", T0 + 20);
    repo.git(&["merge", "-q", "--no-ff", "--no-edit", "side"], Some(T0 + 30));
    let merge = repo.git(&["rev-parse", "HEAD"], None).trim().to_string();

    let c = extract_commit(&RepoSource::new(repo.path()), &merge).unwrap();
    let paths: Vec<&str> = c.changes.iter().map(|ch| ch.file_path.as_str()).collect();
    assert_eq!(paths, ["side.txt"]);
    assert_eq!(enumerate_commits(&RepoSource::new(repo.path())).unwrap().len(), 4);
}

#[test]
fn binary_only_commit_has_no_changes() {
    let repo = Repo::new();
    repo.write("a.txt", b"text\n");
    repo.commit("root", T0);
    repo.write("blob.bin", &[0u8, 159, 146, 150, 0, 1, 2, 3, 0, 255]);
    let h = repo.commit("binary", T0 + 10);
    let c = extract_commit(&RepoSource::new(repo.path()), &h).unwrap();
    assert!(c.changes.is_empty());
    assert_eq!(c.la(), 0);
}

#[test]
fn renames_are_skipped() {
    let repo = Repo::new();
    repo.write("old_name.txt", b"one\ntwo\nthree\nfour\n");
    repo.commit("root", T0);
    repo.git(&["mv", "old_name.txt", "new_name.txt"], None);
    let h = repo.commit("rename", T0 + 10);
    let c = extract_commit(&RepoSource::new(repo.path()), &h).unwrap();
    assert!(c.changes.is_empty());
}

#[test]
fn unknown_hash_is_an_error() {
    let (repo, _) = three_commits();
    let err = extract_commit(&RepoSource::new(repo.path()), "0123456789abcdef0123456789abcdef01234567").unwrap_err();
    assert!(matches!(err, IngestError::UnknownCommit(_)));
}

#[test]
fn labels_join_and_ingest_is_deterministic() {
    let (repo, hashes) = three_commits();
    let source = RepoSource::new(repo.path());
    let mut labels = BTreeMap::new();
    labels.insert(hashes[1].clone(), Label::Buggy);
    labels.insert("f".repeat(40), Label::Buggy);
    let commits = attach_labels(ingest_repository(&source).unwrap(), &labels);
    let got: Vec<Label> = commits.iter().map(|c| c.label).collect();
    assert_eq!(got, [Label::Clean, Label::Buggy, Label::Clean]);
    assert!(commits[1].changes.iter().all(|c| c.label == Label::Buggy));

    let render = || {
        let commits = attach_labels(ingest_repository(&source).unwrap(), &labels);
        let mut buf = Vec::new();
        io::write_corpus_to(&documents_from_commits(&commits), &mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

#[test]
fn parser_agrees_with_git_diff() {
    let dir = tempfile::tempdir().unwrap();
    let old = tmp_file(dir.path(), "old.py", "x=0\nkeep\n");
    let new = tmp_file(dir.path(), "new.py", "x=1\ny=2\nkeep\n");
    let other_old = tmp_file(dir.path(), "o1.py", "a\nb\nc\n");
    let other_new = tmp_file(dir.path(), "o2.py", "a\nc\nd\n");
    let diff = |a: &std::path::Path, b: &std::path::Path| {
        let out = std::process::Command::new("git")
            .args(["diff", "--no-index", "--no-color", "-U0"])
            .arg(a)
            .arg(b)
            .output()
            .unwrap();
        String::from_utf8(out.stdout).unwrap()
    };

    let files = parse_unified_diff(&diff(&old, &new)).unwrap();
    assert_eq!(files.len(), 1);
    let added: Vec<(u32, String)> = files[0].hunks.iter().flat_map(|h| h.added.clone()).collect();
    let deleted: Vec<(u32, String)> = files[0].hunks.iter().flat_map(|h| h.deleted.clone()).collect();
    assert_eq!(added, [(1, "x=1".to_string()), (2, "y=2".to_string())]);
    assert_eq!(deleted, [(1, "x=0".to_string())]);

    let both = diff(&old, &new) + &diff(&other_old, &other_new);
    let files = parse_unified_diff(&both).unwrap();
    assert_eq!(files.len(), 2);
    let added: Vec<(u32, String)> = files[1].hunks.iter().flat_map(|h| h.added.clone()).collect();
    let deleted: Vec<(u32, String)> = files[1].hunks.iter().flat_map(|h| h.deleted.clone()).collect();
    assert_eq!(added, [(3, "d".to_string())]);
    assert_eq!(deleted, [(2, "b".to_string())]);
    assert!(files[1].path.ends_with("o2.py"));
}

#[test]
fn cli_ingest() {
    let (repo, hashes) = three_commits();
    let work = tempfile::tempdir().unwrap();
    let labels = tmp_file(work.path(), "labels.csv", &format!("{},buggy\n", hashes[2]));
    let out = work.path().join("corpus.jsonl");
    let o = run(&[&"ingest", &"--repo", &repo.path(), &"--labels", &labels, &"--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let docs = io::load_corpus(&out).unwrap();
    assert_eq!(docs.len(), 3);
    assert_eq!(docs.iter().filter(|d| d.label == Label::Buggy).count(), 1);

    let missing = work.path().join("no-such-labels.csv");
    let o = run(&[&"ingest", &"--repo", &repo.path(), &"--labels", &missing, &"--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no-such-labels.csv"));

    let empty = Repo::new();
    let out2 = work.path().join("empty.jsonl");
    let o = run(&[&"ingest", &"--repo", &empty.path(), &"--out", &out2]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(&out2).unwrap(), b"");
}
