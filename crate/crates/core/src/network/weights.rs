//! Plain-text weight files.
//!
//! ```text
//! # comment lines start with '#'
//! 2 3
//! +1 -1 +1
//! -1 -1 +1
//! ```
//!
//! The first non-comment line holds `rows cols`; each following line is one
//! row of `+1` / `-1` tokens separated by whitespace.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::WeightMatrix;
use crate::device::Weight;
use crate::error::{Error, Result};

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let tail = &rest[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let col = offset + start + 1;
        let tok = &tail[..len];
        offset += start + len;
        rest = &tail[len..];
        Some((col, tok))
    })
}

fn parse_weight(tok: &str) -> Option<Weight> {
    match tok {
        "+1" | "1" => Some(Weight::Plus),
        "-1" => Some(Weight::Minus),
        _ => None,
    }
}

/// Parses weight-file text. `path` is only used in error messages.
pub fn parse_weights(text: &str, path: &Path) -> Result<WeightMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, 1, "missing 'rows cols' header"))?;
    let dims: Vec<(usize, &str)> = tokens(header).collect();
    if dims.len() != 2 {
        return Err(parse_error(path, header_line, 1, "header must be 'rows cols'"));
    }
    let parse_dim = |(col, tok): (usize, &str)| {
        tok.parse::<usize>()
            .map_err(|_| parse_error(path, header_line, col, format!("invalid dimension '{tok}'")))
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;

    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        if seen_rows == rows {
            return Err(parse_error(
                path,
                line_no,
                1,
                format!("more than the {rows} rows declared in the header"),
            ));
        }
        let mut count = 0;
        for (col, tok) in tokens(line) {
            if count == cols {
                return Err(parse_error(path, line_no, col, format!("row has more than {cols} entries")));
            }
            let w = parse_weight(tok)
                .ok_or_else(|| parse_error(path, line_no, col, format!("weight must be +1 or -1, got '{tok}'")))?;
            data.push(w);
            count += 1;
        }
        if count != cols {
            return Err(parse_error(
                path,
                line_no,
                line.len() + 1,
                format!("row has {count} entries, expected {cols}"),
            ));
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(parse_error(
            path,
            last_line + 1,
            1,
            format!("header declares {rows} rows but {seen_rows} present"),
        ));
    }
    WeightMatrix::new(rows, cols, data)
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_weights(&text, path)
}

pub fn write_weights<W: Write>(matrix: &WeightMatrix, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", matrix.rows(), matrix.cols())?;
    for row in matrix.iter_rows() {
        let line: Vec<&str> = row
            .iter()
            .map(|w| match w {
                Weight::Plus => "+1",
                Weight::Minus => "-1",
            })
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn save_weights(matrix: &WeightMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path: PathBuf = path.as_ref().to_path_buf();
    let mut buf = Vec::new();
    write_weights(matrix, &mut buf).map_err(|e| Error::io(&path, e))?;
    fs::write(&path, buf).map_err(|e| Error::io(&path, e))
}
