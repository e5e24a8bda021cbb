//! The set file format: UTF-8 text, one element per line, each an optionally
//! signed integer or "p/q" with q > 0. Blank lines and lines starting with
//! '#' are ignored. No thousands separators.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::set::FiniteSet;

pub fn parse_set(text: &str) -> Result<FiniteSet> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: ExactScalar = line.parse().map_err(|e| match e {
            Error::InputFormat { msg, .. } => Error::InputFormat { line: i + 1, msg },
            other => other,
        })?;
        values.push(value);
    }
    FiniteSet::new(values)
}

pub fn read_set(path: &Path) -> Result<FiniteSet> {
    parse_set(&fs::read_to_string(path)?)
}

pub fn format_set(set: &FiniteSet) -> String {
    let mut out = String::new();
    for e in set.iter() {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

pub fn write_set(path: &Path, set: &FiniteSet) -> Result<()> {
    fs::write(path, format_set(set))?;
    Ok(())
}
