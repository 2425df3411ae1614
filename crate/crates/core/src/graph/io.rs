// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Edge-list and MatrixMarket ingestion.
//!
//! Edge lists hold one whitespace-separated `u v` pair per line; `#` starts a
//! comment. When every token is a non-negative integer the tokens are used as
//! vertex ids directly. Otherwise tokens are treated as labels, assigned dense
//! ids in first-seen order, and returned in [`LoadedGraph::labels`].
//!
//! MatrixMarket `coordinate` files are accepted with `pattern` or numeric
//! fields and `general` or `symmetric` symmetry. Values are ignored, every
//! entry `(i, j)` becomes the undirected edge `{i - 1, j - 1}`, diagonal
//! entries are dropped, and repeated entries collapse.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rustc_hash::FxHashMap;

use super::{Graph, VertexId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    MatrixMarket,
}

impl GraphFormat {
    /// `.mtx` files are MatrixMarket, everything else is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => GraphFormat::MatrixMarket,
            _ => GraphFormat::EdgeList,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// External label of each vertex when the input used non-numeric tokens.
    pub labels: Option<Vec<String>>,
    pub dropped_self_loops: usize,
    pub duplicate_entries: usize,
}

pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_graph(&text, format, path)
}

pub fn parse_graph(text: &str, format: GraphFormat, origin: &Path) -> Result<LoadedGraph> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text, origin),
        GraphFormat::MatrixMarket => parse_matrix_market(text, origin),
    }
}

fn parse_error(origin: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: PathBuf::from(origin),
        line,
        message: message.into(),
    }
}

struct EdgeAccumulator {
    edges: Vec<(VertexId, VertexId)>,
    self_loops: usize,
}

impl EdgeAccumulator {
    fn new() -> Self {
        EdgeAccumulator {
            edges: Vec::new(),
            self_loops: 0,
        }
    }

    fn push(&mut self, u: VertexId, v: VertexId) {
        match u.cmp(&v) {
            std::cmp::Ordering::Equal => self.self_loops += 1,
            std::cmp::Ordering::Less => self.edges.push((u, v)),
            std::cmp::Ordering::Greater => self.edges.push((v, u)),
        }
    }

    fn finish(self, vertex_count: usize, labels: Option<Vec<String>>) -> LoadedGraph {
        let raw = self.edges.len();
        let graph = Graph::from_normalized(vertex_count, self.edges);
        LoadedGraph {
            duplicate_entries: raw - graph.edge_count(),
            graph,
            labels,
            dropped_self_loops: self.self_loops,
        }
    }
}

fn parse_edge_list(text: &str, origin: &Path) -> Result<LoadedGraph> {
    let mut pairs: Vec<(usize, &str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(u), Some(v), None) => pairs.push((i + 1, u, v)),
            _ => {
                return Err(parse_error(
                    origin,
                    i + 1,
                    "expected exactly two tokens `u v`",
                ))
            }
        }
    }

    let numeric = pairs
        .iter()
        .all(|(_, u, v)| u.parse::<u32>().is_ok() && v.parse::<u32>().is_ok());
    let mut acc = EdgeAccumulator::new();
    if numeric {
        let mut vertex_count = 0usize;
        for &(line, u, v) in &pairs {
            let (u, v): (u32, u32) = (u.parse().unwrap(), v.parse().unwrap());
            if u == u32::MAX || v == u32::MAX {
                return Err(parse_error(origin, line, "vertex id too large"));
            }
            vertex_count = vertex_count.max(u.max(v) as usize + 1);
            acc.push(u, v);
        }
        Ok(acc.finish(vertex_count, None))
    } else {
        let mut ids: FxHashMap<&str, VertexId> = FxHashMap::default();
        let mut labels = Vec::new();
        for &(_, u, v) in &pairs {
            let mut intern = |token| {
                *ids.entry(token).or_insert_with(|| {
                    labels.push(token.to_string());
                    (labels.len() - 1) as VertexId
                })
            };
            let (u, v) = (intern(u), intern(v));
            acc.push(u, v);
        }
        let n = labels.len();
        Ok(acc.finish(n, Some(labels)))
    }
}

fn parse_matrix_market(text: &str, origin: &Path) -> Result<LoadedGraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_error(origin, 1, "empty file"))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_error(
            origin,
            1,
            "expected `%%MatrixMarket matrix ...` header",
        ));
    }
    if fields[2] != "coordinate" {
        return Err(parse_error(
            origin,
            1,
            format!("unsupported layout `{}`", fields[2]),
        ));
    }
    if !matches!(
        fields[3].as_str(),
        "pattern" | "real" | "integer" | "complex"
    ) {
        return Err(parse_error(
            origin,
            1,
            format!("unsupported field `{}`", fields[3]),
        ));
    }
    if !matches!(fields[4].as_str(), "general" | "symmetric") {
        return Err(parse_error(
            origin,
            1,
            format!("unsupported symmetry `{}`", fields[4]),
        ));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut declared = 0usize;
    let mut seen = 0usize;
    let mut acc = EdgeAccumulator::new();
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut next_index = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| parse_error(origin, i + 1, format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|_| parse_error(origin, i + 1, format!("invalid {what}")))
        };
        match size {
            None => {
                let rows = next_index("row count")?;
                let cols = next_index("column count")?;
                declared = next_index("entry count")?;
                if rows != cols {
                    return Err(parse_error(
                        origin,
                        i + 1,
                        "adjacency matrix must be square",
                    ));
                }
                if rows >= u32::MAX as usize {
                    return Err(parse_error(origin, i + 1, "dimension too large"));
                }
                size = Some((rows, cols));
            }
            Some((rows, _)) => {
                let r = next_index("row index")?;
                let c = next_index("column index")?;
                if r == 0 || c == 0 || r > rows || c > rows {
                    return Err(parse_error(origin, i + 1, "entry index out of range"));
                }
                seen += 1;
                acc.push((r - 1) as VertexId, (c - 1) as VertexId);
            }
        }
    }
    let (rows, _) = size.ok_or_else(|| parse_error(origin, 1, "missing size line"))?;
    if seen != declared {
        return Err(parse_error(
            origin,
            text.lines().count(),
            format!("header declares {declared} entries, found {seen}"),
        ));
    }
    Ok(acc.finish(rows, None))
}

/// Writes `u v` lines in sorted edge order, preceded by a comment header.
pub fn write_edge_list(graph: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "# vertices {} edges {}",
        graph.vertex_count(),
        graph.edge_count()
    )?;
    for &(u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}
