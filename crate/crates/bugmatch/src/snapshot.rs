//! On-disk index snapshots: a one-line versioned header followed by the index
//! as JSON.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use bugmatch_core::InvertedIndex;
use thiserror::Error;

pub const MAGIC: &str = "bugmatch-index";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not an index snapshot (header {0:?})")]
    BadHeader(String),
    #[error("snapshot version {found} is not supported (expected {VERSION})")]
    Version { found: u32 },
    #[error("corrupt snapshot body: {0}")]
    Body(String),
}

pub fn write_snapshot_to<W: Write>(index: &InvertedIndex, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{MAGIC} v{VERSION}")?;
    serde_json::to_writer(&mut out, index)?;
    out.write_all(b"\n")?;
    out.flush()
}

pub fn read_snapshot<R: Read>(reader: R) -> Result<InvertedIndex, SnapshotError> {
    let mut reader = BufReader::new(reader);
    let mut header = String::new();
    reader
        .read_line(&mut header)
        .map_err(|e| SnapshotError::BadHeader(e.to_string()))?;
    let header = header.trim_end();
    let version = header
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.strip_prefix(" v"))
        .ok_or_else(|| SnapshotError::BadHeader(header.chars().take(40).collect()))?;
    let found: u32 = version
        .parse()
        .map_err(|_| SnapshotError::BadHeader(header.chars().take(40).collect()))?;
    if found != VERSION {
        return Err(SnapshotError::Version { found });
    }
    let index: InvertedIndex =
        serde_json::from_reader(reader).map_err(|e| SnapshotError::Body(e.to_string()))?;
    index
        .validate()
        .map_err(|e| SnapshotError::Body(e.to_string()))?;
    Ok(index)
}

pub fn save(index: &InvertedIndex, path: &Path) -> Result<(), SnapshotError> {
    let io_err = |source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_snapshot_to(index, BufWriter::new(file)).map_err(io_err)
}

pub fn load(path: &Path) -> Result<InvertedIndex, SnapshotError> {
    let file = File::open(path).map_err(|source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_snapshot(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bugmatch_core::{Change, Label, MltParams};

    fn sample() -> InvertedIndex {
        let mut idx = InvertedIndex::default();
        let a = Change::new("a", "x.c", vec!["free(p); use(p->next);".into()], vec![], Label::Buggy);
        let b = Change::new("b", "y.c", vec!["int total = a + b;".into()], vec![], Label::Clean);
        idx.add_document(&a, 10);
        idx.add_document(&b, 20);
        idx
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let idx = sample();
        let mut buf = Vec::new();
        write_snapshot_to(&idx, &mut buf).unwrap();
        let back = read_snapshot(&buf[..]).unwrap();
        assert_eq!(back, idx);
        let probe = ["use(p->next); int total"];
        let p = MltParams::default();
        let (x, y) = (idx.mlt_query(&probe, &p), back.mlt_query(&probe, &p));
        assert_eq!(x.len(), y.len());
        for (h, g) in x.iter().zip(&y) {
            assert_eq!(h.relevance_score.to_bits(), g.relevance_score.to_bits());
        }
    }

    #[test]
    fn rejects_bad_headers() {
        let mut buf = Vec::new();
        write_snapshot_to(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        let v2 = text.replacen("v1", "v2", 1);
        assert!(matches!(read_snapshot(v2.as_bytes()), Err(SnapshotError::Version { found: 2 })));
        let garbage = text.replacen("bugmatch-index", "xx", 1);
        assert!(matches!(read_snapshot(garbage.as_bytes()), Err(SnapshotError::BadHeader(_))));
        let truncated = &text[..text.len() / 2];
        assert!(matches!(read_snapshot(truncated.as_bytes()), Err(SnapshotError::Body(_))));
    }
}
