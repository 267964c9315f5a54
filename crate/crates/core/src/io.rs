//! Plain-text instance formats. Indices on disk are 1-based.
//!
//! Read matrix:
//! ```text
//! # optional comments
//! m n
//! i j v        (one line per observed entry, v ∈ {-1, 1})
//! ```
//!
//! Ground truth: `n`, then `h` space-separated, then `m`, then `c`.
//! Haplotype: `n`, then the values space-separated.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Entry, GroundTruth, Haplotype, ReadMatrix, Sign};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_fields<T: std::str::FromStr>(line: usize, text: &str, want: Option<usize>) -> Result<Vec<T>> {
    let fields = text
        .split_whitespace()
        .map(|f| {
            f.parse::<T>()
                .map_err(|_| parse_err(line, format!("cannot parse {f:?}")))
        })
        .collect::<Result<Vec<T>>>()?;
    if let Some(want) = want {
        if fields.len() != want {
            return Err(parse_err(
                line,
                format!("expected {want} fields, found {}", fields.len()),
            ));
        }
    }
    Ok(fields)
}

fn parse_sign(line: usize, v: i64) -> Result<Sign> {
    Sign::from_i64(v).ok_or_else(|| parse_err(line, format!("value {v} is not -1 or 1")))
}

pub fn parse_read_matrix(text: &str) -> Result<ReadMatrix> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "missing `m n` header"))?;
    let dims = parse_fields::<usize>(line, header, Some(2))?;
    let (m, n) = (dims[0], dims[1]);
    if m == 0 || n == 0 {
        return Err(parse_err(line, "dimensions must be positive"));
    }
    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, text) in lines {
        let f = parse_fields::<i64>(line, text, Some(3))?;
        let (i, j) = (f[0], f[1]);
        if i < 1 || i as usize > m || j < 1 || j as usize > n {
            return Err(parse_err(line, format!("index ({i}, {j}) outside 1..={m} x 1..={n}")));
        }
        let (row, col) = (i as usize - 1, j as usize - 1);
        if !seen.insert((row, col)) {
            return Err(parse_err(line, format!("duplicate entry ({i}, {j})")));
        }
        entries.push(Entry {
            row,
            col,
            value: parse_sign(line, f[2])?,
        });
    }
    ReadMatrix::new(m, n, entries)
}

pub fn format_read_matrix(rm: &ReadMatrix) -> String {
    let mut out = format!("{} {}\n", rm.rows(), rm.cols());
    for e in rm.entries() {
        let _ = writeln!(out, "{} {} {}", e.row + 1, e.col + 1, e.value);
    }
    out
}

fn parse_sign_vector(
    lines: &mut dyn Iterator<Item = (usize, &str)>,
    what: &str,
    last_line: &mut usize,
) -> Result<Vec<Sign>> {
    let (line, text) = lines
        .next()
        .ok_or_else(|| parse_err(*last_line + 1, format!("missing length of {what}")))?;
    let len = parse_fields::<usize>(line, text, Some(1))?[0];
    let (line, text) = lines
        .next()
        .ok_or_else(|| parse_err(line + 1, format!("missing values of {what}")))?;
    *last_line = line;
    parse_fields::<i64>(line, text, Some(len))?
        .into_iter()
        .map(|v| parse_sign(line, v))
        .collect()
}

fn join(values: &[Sign]) -> String {
    values.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruth> {
    let mut lines = content_lines(text);
    let mut last = 0;
    let h = parse_sign_vector(&mut lines, "h", &mut last)?;
    let c = parse_sign_vector(&mut lines, "c", &mut last)?;
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "unexpected trailing content"));
    }
    Ok(GroundTruth::new(Haplotype::new(h), c))
}

pub fn format_ground_truth(gt: &GroundTruth) -> String {
    format!(
        "{}\n{}\n{}\n{}\n",
        gt.cols(),
        join(gt.h.values()),
        gt.rows(),
        join(&gt.c)
    )
}

pub fn parse_haplotype(text: &str) -> Result<Haplotype> {
    let mut lines = content_lines(text);
    let mut last = 0;
    let h = parse_sign_vector(&mut lines, "haplotype", &mut last)?;
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "unexpected trailing content"));
    }
    Ok(Haplotype::new(h))
}

pub fn format_haplotype(h: &Haplotype) -> String {
    format!("{}\n{}\n", h.len(), join(h.values()))
}
