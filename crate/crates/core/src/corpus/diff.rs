// unified diff parser

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::Hunk;

/// Hunks of one file in a diff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiff {
    pub path: String,
    pub hunks: Vec<Hunk>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffError {
    MalformedHunkHeader { offset: usize, line: String },
    HunkOutsideFile { offset: usize },
}

impl fmt::Display for DiffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffError::MalformedHunkHeader { offset, line } => {
                write!(f, "malformed hunk header at byte {offset}: {line:?}")
            }
            DiffError::HunkOutsideFile { offset } => {
                write!(f, "hunk at byte {offset} is not preceded by a file header")
            }
        }
    }
}

impl core::error::Error for DiffError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Skip {
    Binary,
    Rename,
}

#[derive(Default)]
struct Section {
    git_path: Option<String>,
    old_path: Option<String>,
    new_path: Option<String>,
    hunks: Vec<Hunk>,
    skip: Option<Skip>,
}

impl Section {
    fn path(&self) -> String {
        let usable = |p: &Option<String>| p.clone().filter(|p| p != "/dev/null");
        usable(&self.new_path)
            .or_else(|| usable(&self.old_path))
            .or_else(|| self.git_path.clone())
            .unwrap_or_default()
    }

    fn finish(self, out: &mut Vec<FileDiff>) {
        let path = self.path();
        match self.skip {
            Some(Skip::Binary) => log::warn!("skipping binary file {path}"),
            Some(Skip::Rename) => log::warn!("skipping renamed or copied file {path}"),
            None if !self.hunks.is_empty() => out.push(FileDiff {
                path,
                hunks: self.hunks,
            }),
            None => {}
        }
    }
}

struct OpenHunk {
    hunk: Hunk,
    old_line: u32,
    new_line: u32,
    old_left: u32,
    new_left: u32,
}

/// Parses `git diff` / unified diff output into per-file hunks. Context lines
/// are dropped. Binary files and renames or copies are skipped with a warning.
pub fn parse_unified_diff(diff_text: &str) -> Result<Vec<FileDiff>, DiffError> {
    let mut files = Vec::new();
    let mut section: Option<Section> = None;
    let mut open: Option<OpenHunk> = None;
    let mut offset = 0usize;

    for raw in diff_text.split_inclusive('\n') {
        let line_offset = offset;
        offset += raw.len();
        let line = raw.strip_suffix('\n').unwrap_or(raw);
        let line = line.strip_suffix('\r').unwrap_or(line);

        if let Some(h) = open.as_mut() {
            let consumed = match line.as_bytes().first() {
                Some(b'+') if h.new_left > 0 => {
                    h.hunk.added.push((h.new_line, line[1..].into()));
                    h.new_line += 1;
                    h.new_left -= 1;
                    true
                }
                Some(b'-') if h.old_left > 0 => {
                    h.hunk.deleted.push((h.old_line, line[1..].into()));
                    h.old_line += 1;
                    h.old_left -= 1;
                    true
                }
                Some(b' ') | None if h.old_left > 0 && h.new_left > 0 => {
                    h.old_line += 1;
                    h.new_line += 1;
                    h.old_left -= 1;
                    h.new_left -= 1;
                    true
                }
                Some(b'\\') => true,
                _ => false,
            };
            if open.as_ref().is_some_and(|h| h.old_left == 0 && h.new_left == 0) || !consumed {
                let done = open.take().map(|h| h.hunk);
                if let (Some(hunk), Some(s)) = (done, section.as_mut()) {
                    s.hunks.push(hunk);
                }
            }
            if consumed {
                continue;
            }
        }

        if let Some(rest) = line.strip_prefix("diff --git ") {
            if let Some(s) = section.take() {
                s.finish(&mut files);
            }
            section = Some(Section {
                git_path: git_header_path(rest),
                ..Section::default()
            });
        } else if let Some(rest) = line.strip_prefix("--- ") {
            let starts_new = match &section {
                None => true,
                Some(s) => !s.hunks.is_empty() || s.old_path.is_some(),
            };
            if starts_new {
                if let Some(s) = section.take() {
                    s.finish(&mut files);
                }
                section = Some(Section::default());
            }
            if let Some(s) = section.as_mut() {
                s.old_path = Some(header_path(rest, "a/"));
            }
        } else if let Some(rest) = line.strip_prefix("+++ ") {
            let s = section.get_or_insert_with(Section::default);
            s.new_path = Some(header_path(rest, "b/"));
        } else if line.starts_with("@@") {
            let Some(_) = section.as_ref() else {
                return Err(DiffError::HunkOutsideFile { offset: line_offset });
            };
            let (old_start, old_len, new_start, new_len) =
                parse_hunk_header(line).ok_or_else(|| DiffError::MalformedHunkHeader {
                    offset: line_offset,
                    line: line.into(),
                })?;
            let h = OpenHunk {
                hunk: Hunk::default(),
                old_line: old_start.max(1),
                new_line: new_start.max(1),
                old_left: old_len,
                new_left: new_len,
            };
            if old_len == 0 && new_len == 0 {
                if let Some(s) = section.as_mut() {
                    s.hunks.push(h.hunk);
                }
            } else {
                open = Some(h);
            }
        } else if line.starts_with("Binary files ") || line == "GIT binary patch" {
            if let Some(s) = section.as_mut() {
                s.skip = Some(Skip::Binary);
            }
        } else if line.starts_with("rename from ")
            || line.starts_with("rename to ")
            || line.starts_with("copy from ")
            || line.starts_with("copy to ")
        {
            if let Some(s) = section.as_mut() {
                s.skip.get_or_insert(Skip::Rename);
            }
        }
    }

    if let (Some(h), Some(s)) = (open.take(), section.as_mut()) {
        s.hunks.push(h.hunk);
    }
    if let Some(s) = section.take() {
        s.finish(&mut files);
    }
    Ok(files)
}

/// `@@ -a[,b] +c[,d] @@ ...`
fn parse_hunk_header(line: &str) -> Option<(u32, u32, u32, u32)> {
    let rest = line.strip_prefix("@@ ")?;
    let end = rest.find(" @@")?;
    let mut parts = rest[..end].split(' ');
    let old = parts.next()?.strip_prefix('-')?;
    let new = parts.next()?.strip_prefix('+')?;
    if parts.next().is_some() {
        return None;
    }
    let range = |s: &str| -> Option<(u32, u32)> {
        match s.split_once(',') {
            Some((start, len)) => Some((start.parse().ok()?, len.parse().ok()?)),
            None => Some((s.parse().ok()?, 1)),
        }
    };
    let (a, b) = range(old)?;
    let (c, d) = range(new)?;
    Some((a, b, c, d))
}

fn header_path(rest: &str, prefix: &str) -> String {
    let raw = if rest.starts_with('"') {
        unquote(rest)
    } else {
        // plain diffs may append a tab and a timestamp
        String::from(rest.split('\t').next().unwrap_or(rest))
    };
    if raw == "/dev/null" {
        return raw;
    }
    match raw.strip_prefix(prefix) {
        Some(p) => p.into(),
        None => raw,
    }
}

fn git_header_path(rest: &str) -> Option<String> {
    if let Some(idx) = rest.rfind(" \"b/") {
        let p = unquote(&rest[idx + 1..]);
        return p.strip_prefix("b/").map(String::from);
    }
    rest.rfind(" b/").map(|idx| String::from(&rest[idx + 3..]))
}

/// Undoes git's C-style path quoting.
fn unquote(s: &str) -> String {
    let inner = s.trim_start_matches('"');
    let inner = match inner.rfind('"') {
        Some(end) => &inner[..end],
        None => inner,
    };
    let bytes = inner.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'\\' || i + 1 >= bytes.len() {
            out.push(bytes[i]);
            i += 1;
            continue;
        }
        let c = bytes[i + 1];
        i += 2;
        match c {
            b'n' => out.push(b'\n'),
            b't' => out.push(b'\t'),
            b'r' => out.push(b'\r'),
            b'a' => out.push(0x07),
            b'b' => out.push(0x08),
            b'f' => out.push(0x0c),
            b'v' => out.push(0x0b),
            b'0'..=b'7' => {
                let mut v = u32::from(c - b'0');
                let mut n = 1;
                while n < 3 && i < bytes.len() && (b'0'..=b'7').contains(&bytes[i]) {
                    v = v * 8 + u32::from(bytes[i] - b'0');
                    i += 1;
                    n += 1;
                }
                out.push(v as u8);
            }
            other => out.push(other),
        }
    }
    String::from_utf8_lossy(&out).into_owned()
}
