//! Text formats.
//!
//! Hypergraph: a header line `n k m`, then `m` lines of `k` ascending
//! 0-based vertex indices separated by single spaces, lines in
//! lexicographic order. Coloring: one line of `n` characters from `{+,-}`.

use std::fmt::Write as _;
use std::path::Path;

use super::{Coloring, Hypergraph};
use crate::error::{Error, Result};

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::with_capacity(16 + h.num_edges() * h.k() * 4);
    writeln!(out, "{} {} {}", h.n(), h.k(), h.num_edges()).unwrap();
    for e in h.edges() {
        let mut first = true;
        for v in e {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses the hypergraph text format. A file with repeated edges yields a
/// multi-hypergraph.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header line \"n k m\""))?;
    let fields = parse_numbers(header, 1)?;
    let [n, k, m] = fields[..] else {
        return Err(Error::parse(
            1,
            format!(
                "header must have 3 fields \"n k m\", found {}",
                fields.len()
            ),
        ));
    };
    if k == 0 {
        return Err(Error::parse(1, "arity k must be at least 1"));
    }
    let (n, k, m) = (n as usize, k as usize, m as usize);
    let mut flat = Vec::with_capacity(m * k);
    let mut read = 0usize;
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if read == m {
            return Err(Error::parse(
                lineno,
                format!("more than m = {m} edge lines"),
            ));
        }
        let edge = parse_numbers(line, lineno)?;
        if edge.len() != k {
            return Err(Error::parse(
                lineno,
                format!("edge has {} vertices, expected k = {k}", edge.len()),
            ));
        }
        for w in edge.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::parse(
                    lineno,
                    "edge vertices must be strictly ascending",
                ));
            }
        }
        if let Some(&v) = edge.iter().find(|&&v| v as usize >= n) {
            return Err(Error::parse(
                lineno,
                format!("vertex {v} out of range for n = {n}"),
            ));
        }
        flat.extend(edge.iter().map(|&v| v as u32));
        read += 1;
    }
    if read != m {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("expected {m} edge lines, found {read}"),
        ));
    }
    let has_repeats = flat
        .chunks_exact(k)
        .zip(flat.chunks_exact(k).skip(1))
        .any(|(a, b)| a == b);
    Hypergraph::from_flat(n, k, flat, has_repeats)
}

fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>()
                .map_err(|_| Error::parse(lineno, format!("not a nonnegative integer: {tok:?}")))
        })
        .collect()
}

pub fn write_coloring(sigma: &Coloring) -> String {
    format!("{sigma}\n")
}

pub fn parse_coloring(text: &str) -> Result<Coloring> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let line = lines.next().unwrap_or("");
    if lines.next().is_some() {
        return Err(Error::parse(2, "a coloring file holds a single line"));
    }
    line.trim().parse()
}

pub fn read_hypergraph(path: impl AsRef<Path>) -> Result<Hypergraph> {
    parse_hypergraph(&std::fs::read_to_string(path)?)
}

pub fn read_coloring(path: impl AsRef<Path>) -> Result<Coloring> {
    parse_coloring(&std::fs::read_to_string(path)?)
}
