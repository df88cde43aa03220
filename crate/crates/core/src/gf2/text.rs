//! Plain-text matrix format: a `rows cols` header, then one line per row
//! listing the 0-based columns holding a one, space separated. A zero row is
//! an empty line.

use std::io::{BufRead, Write};

use super::SparseBitMatrix;
use crate::error::{Error, Result};

pub fn write_matrix<W: Write + ?Sized>(m: &SparseBitMatrix, out: &mut W) -> Result<()> {
    writeln!(out, "{} {}", m.rows(), m.cols())?;
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(usize::to_string).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn matrix_to_string(m: &SparseBitMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix(m, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

fn parse_usize(tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("bad {what} `{tok}`")))
}

/// Reads a matrix from `lines`, consuming the header and exactly `rows`
/// row lines. Anything after that is left for the caller.
pub fn read_matrix_lines<I>(lines: &mut I) -> Result<SparseBitMatrix>
where
    I: Iterator<Item = std::io::Result<String>>,
{
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header line".into()))??;
    let mut it = header.split_whitespace();
    let (Some(r), Some(c), None) = (it.next(), it.next(), it.next()) else {
        return Err(Error::Parse(format!("header must be `rows cols`, got `{header}`")));
    };
    let rows = parse_usize(r, "row count")?;
    let cols = parse_usize(c, "column count")?;
    let mut supports = Vec::with_capacity(rows);
    for i in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {rows} rows, found {i}")))??;
        let mut support = line
            .split_whitespace()
            .map(|t| parse_usize(t, "column index"))
            .collect::<Result<Vec<_>>>()?;
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("row {i} is not strictly increasing")));
        }
        if let Some(&last) = support.last() {
            if last >= cols {
                return Err(Error::Parse(format!("row {i} column {last} >= {cols}")));
            }
        }
        supports.push(std::mem::take(&mut support));
    }
    SparseBitMatrix::from_row_supports(cols, supports)
}

pub fn read_matrix<R: BufRead>(input: R) -> Result<SparseBitMatrix> {
    let mut lines = input.lines();
    read_matrix_lines(&mut lines)
}
