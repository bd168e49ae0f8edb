//! Code analyzers: a whitespace tokenizer with camel-case sub-splitting, and
//! a code tokenizer whose lowercased output is joined into 4-token shingles.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub const SHINGLE_SIZE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    pub text: String,
    pub position: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalyzerKind {
    CamelCase,
    Shingle,
}

impl AnalyzerKind {
    pub const ALL: [AnalyzerKind; 2] = [AnalyzerKind::CamelCase, AnalyzerKind::Shingle];

    pub fn analyze(self, line: &str) -> Vec<Token> {
        match self {
            AnalyzerKind::CamelCase => analyze_camelcase(line),
            AnalyzerKind::Shingle => analyze_shingle(line),
        }
    }

    /// Like [`analyze`](Self::analyze) but yields only the token texts.
    pub fn terms(self, line: &str) -> Vec<String> {
        match self {
            AnalyzerKind::CamelCase => camelcase_terms(line),
            AnalyzerKind::Shingle => shingle_terms(line),
        }
    }
}

fn positioned(texts: Vec<String>) -> Vec<Token> {
    texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| Token {
            text,
            position: i as u32,
        })
        .collect()
}

/// Whitespace tokens, each followed by its camel-case / punctuation subtokens.
///
/// `if(tbl != null && !isExternal(tbl))` gives
/// `[if(tbl, if, tbl, !=, null, &&, !isExternal(tbl)), is, External, tbl]`.
pub fn analyze_camelcase(line: &str) -> Vec<Token> {
    positioned(camelcase_terms(line))
}

fn camelcase_terms(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in line.split_whitespace() {
        out.push(String::from(raw));
        for sub in camel_subtokens(raw) {
            if sub != raw {
                out.push(String::from(sub));
            }
        }
    }
    out
}

/// Splits on non-alphanumeric characters and at lower-to-upper transitions.
fn camel_subtokens(raw: &str) -> Vec<&str> {
    let mut subs = Vec::new();
    let mut start: Option<usize> = None;
    let mut prev: Option<char> = None;
    for (i, c) in raw.char_indices() {
        if !c.is_alphanumeric() {
            if let Some(s) = start.take() {
                subs.push(&raw[s..i]);
            }
            prev = None;
            continue;
        }
        match (start, prev) {
            (Some(s), Some(p)) if p.is_lowercase() && c.is_uppercase() => {
                subs.push(&raw[s..i]);
                start = Some(i);
            }
            (None, _) => start = Some(i),
            _ => {}
        }
        prev = Some(c);
    }
    if let Some(s) = start {
        subs.push(&raw[s..]);
    }
    subs
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

const FUSED_OPERATORS: [&str; 16] = [
    "!=", "==", "<=", ">=", "&&", "||", "->", "::", "++", "--", "+=", "-=", "*=", "/=", "<<", ">>",
];

/// Language-agnostic code tokenizer: identifier runs, single punctuation
/// characters, and a small table of fused two-character operators.
pub fn code_tokenize(line: &str) -> Vec<Token> {
    positioned(code_terms(line))
}

fn code_terms(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if is_ident_char(c) {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                if !is_ident_char(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push(String::from(&line[i..end]));
            continue;
        }
        let end = i + c.len_utf8();
        if let Some(&(j, d)) = chars.peek() {
            let pair_end = j + d.len_utf8();
            if FUSED_OPERATORS.contains(&&line[i..pair_end]) {
                out.push(String::from(&line[i..pair_end]));
                chars.next();
                continue;
            }
        }
        out.push(String::from(&line[i..end]));
    }
    out
}

/// Lowercased 4-token shingles of [`code_tokenize`], joined without a
/// separator. A line of `n` code tokens yields `max(0, n - 3)` shingles.
pub fn analyze_shingle(line: &str) -> Vec<Token> {
    positioned(shingle_terms(line))
}

fn shingle_terms(line: &str) -> Vec<String> {
    let tokens: Vec<String> = code_terms(line).iter().map(|t| t.to_lowercase()).collect();
    tokens.windows(SHINGLE_SIZE).map(|w| w.concat()).collect()
}
