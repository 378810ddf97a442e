//! Flat `key = value` records and numeric vector files.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub fn write_key_values<W: Write + ?Sized>(out: &mut W, pairs: &[(&str, f64)]) -> std::io::Result<()> {
    for (k, v) in pairs {
        writeln!(out, "{k} = {v:e}")?;
    }
    Ok(())
}

/// Parses records written by [`write_key_values`]. Blank lines and `#`
/// comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, f64)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| Error::Parse {
            path: "<key-values>".into(),
            line: i + 1,
            column: 1,
            message: "expected 'key = value'".into(),
        })?;
        let value = v.trim().parse::<f64>().map_err(|_| Error::Parse {
            path: "<key-values>".into(),
            line: i + 1,
            column: line.find('=').unwrap_or(0) + 2,
            message: format!("invalid number '{}'", v.trim()),
        })?;
        pairs.push((k.trim().to_string(), value));
    }
    Ok(pairs)
}

/// Reads real numbers separated by whitespace or commas; `#` starts a
/// comment that runs to the end of the line.
pub fn parse_vector(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        let mut col = 0;
        for tok in content.split(|c: char| c == ',' || c.is_whitespace()) {
            let start = col;
            col += tok.len() + 1;
            if tok.is_empty() {
                continue;
            }
            let v = tok.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                column: start + 1,
                message: format!("invalid number '{tok}'"),
            })?;
            values.push(v);
        }
    }
    Ok(values)
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vector(&text, path)
}
