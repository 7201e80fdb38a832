//! Matrix Market ingestion.
//!
//! Only the sparsity pattern is kept: the pattern is symmetrized, values
//! and self-loops are dropped, and the largest connected component is
//! re-indexed densely from zero.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{AsmgError, Result};
use crate::graph::{connected_components, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Real,
    Integer,
    Pattern,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub source: String,
    pub field: Field,
    pub symmetry: Symmetry,
    pub raw_rows: usize,
    pub raw_cols: usize,
    pub raw_nnz: usize,
    pub self_loops_dropped: usize,
    /// Vertices outside the largest connected component.
    pub vertices_dropped: usize,
    pub components: usize,
    pub n: usize,
    pub m: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub avg_degree: f64,
    /// Original zero-based row index of every kept vertex.
    #[serde(skip)]
    pub original_ids: Vec<usize>,
}

impl IngestReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{}: {} x {} ({} stored entries, {:?} {:?}) -> n = {}, m = {}, degree min/max/avg = {}/{}/{:.2}",
            self.source,
            self.raw_rows,
            self.raw_cols,
            self.raw_nnz,
            self.field,
            self.symmetry,
            self.n,
            self.m,
            self.min_degree,
            self.max_degree,
            self.avg_degree
        );
        if self.self_loops_dropped > 0 || self.vertices_dropped > 0 {
            let _ = write!(
                s,
                "; dropped {} self-loops and {} vertices outside the largest of {} components",
                self.self_loops_dropped, self.vertices_dropped, self.components
            );
        }
        s
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<(Graph, IngestReport)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_matrix_market_from(BufReader::new(file), &path.display().to_string())
}

pub fn parse_matrix_market(text: &str) -> Result<(Graph, IngestReport)> {
    read_matrix_market_from(text.as_bytes(), "<memory>")
}

fn perr(line: usize, msg: impl Into<String>) -> AsmgError {
    AsmgError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn read_matrix_market_from<R: BufRead>(reader: R, source: &str) -> Result<(Graph, IngestReport)> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (lineno, header) = match lines.next() {
        Some((i, l)) => (i, l?),
        None => return Err(perr(1, "empty file")),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(perr(lineno, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if tokens[1] != "matrix" {
        return Err(perr(lineno, format!("unsupported object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(perr(lineno, format!("unsupported format '{}', only coordinate is read", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        "complex" => Field::Complex,
        f => return Err(perr(lineno, format!("unknown field '{f}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        s => return Err(perr(lineno, format!("unknown symmetry '{s}'"))),
    };
    let values_per_entry = match field {
        Field::Pattern => 0,
        Field::Real | Field::Integer => 1,
        Field::Complex => 2,
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = 0usize;
    let mut self_loops = 0usize;
    let mut last_line = lineno;
    for (i, line) in lines {
        let line = line?;
        last_line = i;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(perr(i, "size line must be 'rows cols entries'"));
                }
                let nums = parse_usizes(&parts, i)?;
                if nums[0] != nums[1] {
                    return Err(perr(i, format!("matrix is {} x {}, not square", nums[0], nums[1])));
                }
                size = Some((nums[0], nums[1], nums[2]));
                edges.reserve(nums[2]);
            }
            Some((rows, _, nnz)) => {
                if parts.len() != 2 + values_per_entry {
                    return Err(perr(
                        i,
                        format!("expected {} fields, found {}", 2 + values_per_entry, parts.len()),
                    ));
                }
                if seen == nnz {
                    return Err(perr(i, format!("more than the declared {nnz} entries")));
                }
                let ij = parse_usizes(&parts[..2], i)?;
                for &k in &ij {
                    if k == 0 || k > rows {
                        return Err(perr(i, format!("index {k} outside 1..={rows}")));
                    }
                }
                for v in &parts[2..] {
                    let ok = match field {
                        Field::Integer => v.parse::<i64>().is_ok(),
                        _ => v.parse::<f64>().is_ok(),
                    };
                    if !ok {
                        return Err(perr(i, format!("invalid value '{v}'")));
                    }
                }
                seen += 1;
                let (u, v) = (ij[0] - 1, ij[1] - 1);
                if u == v {
                    self_loops += 1;
                } else {
                    edges.push((u, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| perr(last_line, "missing size line"))?;
    if seen < nnz {
        return Err(perr(last_line, format!("declared {nnz} entries, found {seen}")));
    }

    let full = Graph::from_edges(rows, &edges);
    let (labels, count) = connected_components(&full);
    if rows == 0 || count == 0 {
        return Err(AsmgError::EmptyGraph);
    }
    let mut sizes = vec![0usize; count];
    labels.iter().for_each(|&l| sizes[l] += 1);
    // largest component, ties to the one holding the smallest vertex
    let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap();
    let original_ids: Vec<usize> = (0..rows).filter(|&v| labels[v] == best).collect();
    let graph = full.induced(&original_ids);

    let n = graph.n_vertices();
    let degrees = (0..n).map(|v| graph.degree(v));
    let report = IngestReport {
        source: source.to_string(),
        field,
        symmetry,
        raw_rows: rows,
        raw_cols: cols,
        raw_nnz: nnz,
        self_loops_dropped: self_loops,
        vertices_dropped: rows - n,
        components: count,
        n,
        m: graph.n_edges(),
        min_degree: degrees.clone().min().unwrap_or(0),
        max_degree: degrees.max().unwrap_or(0),
        avg_degree: 2.0 * graph.n_edges() as f64 / n as f64,
        original_ids,
    };
    Ok((graph, report))
}

fn parse_usizes(parts: &[&str], line: usize) -> Result<Vec<usize>> {
    parts
        .iter()
        .map(|p| p.parse::<usize>().map_err(|_| perr(line, format!("invalid integer '{p}'"))))
        .collect()
}

/// Writes the graph as a symmetric pattern matrix (lower triangle, one-based).
pub fn write_matrix_market<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate pattern symmetric")?;
    writeln!(w, "{} {} {}", g.n_vertices(), g.n_vertices(), g.n_edges())?;
    for (u, v) in g.edges() {
        writeln!(w, "{} {}", v.max(u) + 1, v.min(u) + 1)?;
    }
    Ok(())
}
