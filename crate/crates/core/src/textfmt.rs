//! Line-oriented record format shared by the dataset, catalog, scenario and
//! manifest files.
//!
//! Each non-blank, non-comment line is `kind key=value key=value ...`.
//! Values never contain whitespace; lists are comma-separated. Leading
//! indentation (two spaces per level) is preserved as `depth`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Formats a float with six decimals, falling back to the shortest
/// round-trip representation when six decimals would lose information.
pub fn fmt_num(x: f64) -> String {
    let fixed = format!("{x:.6}");
    match fixed.parse::<f64>() {
        Ok(back) if back == x => fixed,
        _ => format!("{x:?}"),
    }
}

pub fn fmt_list<T: ToString>(items: &[T]) -> String {
    if items.is_empty() {
        return "-".to_string();
    }
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn fmt_num_list(items: &[f64]) -> String {
    if items.is_empty() {
        return "-".to_string();
    }
    items.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(",")
}

/// Builder for one output line.
pub struct Line {
    buf: String,
}

impl Line {
    pub fn new(kind: &str) -> Self {
        Line {
            buf: kind.to_string(),
        }
    }

    pub fn indented(depth: usize, kind: &str) -> Self {
        Line {
            buf: format!("{}{kind}", "  ".repeat(depth)),
        }
    }

    pub fn field(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        let _ = write!(self.buf, " {key}={value}");
        self
    }

    pub fn num(self, key: &str, value: f64) -> Self {
        self.field(key, fmt_num(value))
    }

    pub fn finish(mut self, out: &mut String) {
        self.buf.push('\n');
        out.push_str(&self.buf);
    }
}

#[derive(Debug, Clone)]
pub struct Record {
    pub line: usize,
    pub depth: usize,
    pub kind: String,
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            record: self.kind.clone(),
            message: message.into(),
        }
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| self.err(format!("missing field `{key}`")))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| self.err(format!("field `{key}` has invalid value `{raw}`")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let raw = self.raw(key)?;
        if raw == "-" {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| {
                s.parse()
                    .map_err(|_| self.err(format!("field `{key}` has invalid element `{s}`")))
            })
            .collect()
    }

    pub fn expect_kind(&self, kind: &str) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(self.err(format!("expected `{kind}` record")))
        }
    }
}

pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - trimmed.len();
        let mut parts = trimmed.split_whitespace();
        let kind = parts.next().unwrap_or_default().to_string();
        let mut fields = Vec::new();
        for part in parts {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                record: kind.clone(),
                message: format!("expected key=value, got `{part}`"),
            })?;
            fields.push((k.to_string(), v.to_string()));
        }
        out.push(Record {
            line: idx + 1,
            depth: indent / 2,
            kind,
            fields,
        });
    }
    Ok(out)
}

/// Reads the mandatory `schema` header and checks its version.
pub fn check_header<'a>(records: &'a [Record], expected_kind: &str, version: u32) -> Result<&'a Record> {
    let head = records.first().ok_or_else(|| Error::Parse {
        line: 0,
        record: "schema".into(),
        message: "empty document".into(),
    })?;
    head.expect_kind("schema")?;
    let doc: String = head.get("document")?;
    if doc != expected_kind {
        return Err(head.err(format!("expected document `{expected_kind}`, got `{doc}`")));
    }
    let v: u32 = head.get("schema_version")?;
    if v != version {
        return Err(head.err(format!("unsupported schema_version {v}")));
    }
    Ok(head)
}
