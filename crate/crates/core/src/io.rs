//! Plain-text formats: edge lists, headerless CSV matrices and flat
//! `key=value` records.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::AdjacencyMatrix;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Lines that carry data: neither blank nor `#` comments. Yields 1-based
/// line numbers.
fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(idx, line)| match line {
        Err(e) => Some(Err(Error::Io(e))),
        Ok(text) => {
            let trimmed = text.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                None
            } else {
                Some(Ok((idx + 1, trimmed.to_string())))
            }
        }
    })
}

/// One `i j` pair per line, 0-based, `i < j`, sorted.
pub fn write_edge_list<W: Write>(a: &AdjacencyMatrix, mut out: W) -> Result<()> {
    for (i, j) in a.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

/// Reads an edge list. The node count is the larger of `min_nodes` and one
/// past the largest id.
pub fn read_edge_list<R: BufRead>(reader: R, min_nodes: usize) -> Result<AdjacencyMatrix> {
    let mut edges = Vec::new();
    let mut n = min_nodes;
    for item in data_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_error(line, format!("expected two node ids, found {:?}", text)));
        }
        let id = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_error(line, format!("{s:?} is not a node id")))
        };
        let (i, j) = (id(fields[0])?, id(fields[1])?);
        if i == j {
            return Err(parse_error(line, format!("self-loop at node {i}")));
        }
        n = n.max(i.max(j) + 1);
        edges.push((i, j));
    }
    AdjacencyMatrix::from_edges(n, edges)
}

/// Headerless comma-separated rows; floats use the shortest round-trip form.
pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, mut out: W) -> Result<()> {
    for row in m.row_iter() {
        let fields: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// One value per line.
pub fn write_column_csv<W: Write>(values: &[f64], mut out: W) -> Result<()> {
    for x in values {
        writeln!(out, "{x}")?;
    }
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(reader: R) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let row = text
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .map_err(|_| parse_error(line, format!("{s:?} is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_error(line, format!("expected {} columns, found {}", first.len(), row.len())));
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn write_key_values<W: Write>(pairs: &[(String, String)], mut out: W) -> Result<()> {
    for (key, value) in pairs {
        writeln!(out, "{key}={value}")?;
    }
    Ok(())
}

/// Parses `key=value` lines in file order. Whitespace around keys and values
/// is dropped.
pub fn read_key_values<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected key=value, found {text:?}")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(parse_error(line, "empty key"));
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}
