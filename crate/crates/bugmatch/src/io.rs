//! Corpus files (one JSON record per line) and header-less label CSVs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use bugmatch_core::{CorpusDocument, Label};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("record {record}: {message}")]
    Syntax { record: usize, message: String },
    #[error("record {record}: missing required field `{field}`")]
    MissingField { record: usize, field: &'static str },
    #[error("record {record}: field `{field}`: {message}")]
    InvalidField {
        record: usize,
        field: &'static str,
        message: String,
    },
}

const REQUIRED: [&str; 6] = [
    "commit_hash",
    "file_path",
    "lines_added",
    "lines_deleted",
    "label",
    "author_ts",
];

fn field<T: serde::de::DeserializeOwned>(
    obj: &Map<String, Value>,
    name: &'static str,
    record: usize,
) -> Result<T, CorpusFileError> {
    let value = obj.get(name).ok_or(CorpusFileError::MissingField {
        record,
        field: name,
    })?;
    serde_json::from_value(value.clone()).map_err(|e| CorpusFileError::InvalidField {
        record,
        field: name,
        message: e.to_string(),
    })
}

/// Parses one record; `record` is its 1-based line number.
pub fn parse_record(line: &str, record: usize) -> Result<CorpusDocument, CorpusFileError> {
    let value: Value = serde_json::from_str(line).map_err(|e| CorpusFileError::Syntax {
        record,
        message: e.to_string(),
    })?;
    let Value::Object(obj) = value else {
        return Err(CorpusFileError::Syntax {
            record,
            message: "expected a JSON object".into(),
        });
    };
    for name in REQUIRED {
        if !obj.contains_key(name) {
            return Err(CorpusFileError::MissingField { record, field: name });
        }
    }
    let label: String = field(&obj, "label", record)?;
    let label: Label = label.parse().map_err(|e: bugmatch_core::CorpusError| {
        CorpusFileError::InvalidField {
            record,
            field: "label",
            message: e.to_string(),
        }
    })?;
    Ok(CorpusDocument {
        commit_hash: field(&obj, "commit_hash", record)?,
        file_path: field(&obj, "file_path", record)?,
        lines_added: field(&obj, "lines_added", record)?,
        lines_deleted: field(&obj, "lines_deleted", record)?,
        label,
        author_ts: field(&obj, "author_ts", record)?,
        buggy_lines: match obj.get("buggy_lines") {
            Some(_) => field(&obj, "buggy_lines", record)?,
            None => Vec::new(),
        },
    })
}

/// Reads corpus records. Blank lines are skipped but still counted.
pub fn read_corpus<R: Read>(reader: R) -> Result<Vec<CorpusDocument>, CorpusFileError> {
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| CorpusFileError::Syntax {
            record: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        docs.push(parse_record(&line, i + 1)?);
    }
    Ok(docs)
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusDocument>, CorpusFileError> {
    let file = File::open(path).map_err(|source| CorpusFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_corpus(file)
}

pub fn write_corpus_to<W: Write>(docs: &[CorpusDocument], mut out: W) -> std::io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_corpus(docs: &[CorpusDocument], path: &Path) -> Result<(), CorpusFileError> {
    let io_err = |source| CorpusFileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_corpus_to(docs, BufWriter::new(file)).map_err(io_err)
}

#[derive(Debug, Error)]
pub enum LabelFileError {
    #[error("label file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("label file line {line}: {message}")]
    Invalid { line: u64, message: String },
}

/// Reads `commit_hash,label` rows. A hash listed twice keeps its last label.
pub fn read_labels<R: Read>(reader: R) -> Result<BTreeMap<String, Label>, LabelFileError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut labels = BTreeMap::new();
    for row in rdr.records() {
        let row = row.map_err(|e| LabelFileError::Invalid {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.iter().all(str::is_empty) {
            continue;
        }
        if row.len() != 2 {
            return Err(LabelFileError::Invalid {
                line,
                message: format!("expected 2 columns, found {}", row.len()),
            });
        }
        let label: Label = row[1].parse().map_err(|e: bugmatch_core::CorpusError| {
            LabelFileError::Invalid {
                line,
                message: e.to_string(),
            }
        })?;
        labels.insert(row[0].to_string(), label);
    }
    Ok(labels)
}

pub fn load_labels(path: &Path) -> Result<BTreeMap<String, Label>, LabelFileError> {
    let file = File::open(path).map_err(|source| LabelFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_labels(file)
}
