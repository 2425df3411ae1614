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

//! Fidelity-weighted layout selection.
//!
//! A layout is one row of a pattern's embedding table: logical qubit `i`
//! placed on physical qubit `row[i]`. Its score is the product of the node
//! fidelities of its distinct physical qubits and the edge fidelities of the
//! couplings its pattern edges land on.
//!
//! Scores are attached to every motif table up front. During the join loop
//! the joined scores multiply, which counts each shared boundary vertex once
//! per slice containing it, and counts an edge twice when a slice re-covers an
//! edge an earlier slice already covered. After each join the surplus factors
//! are divided back out, so every final row carries exactly the product above.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use serde::Serialize;

use crate::decompose::Slice;
use crate::engine::{query, MotifDatabase};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::table::{ColumnId, EmbeddingTable};
use crate::vf2::MatchMode;

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    coupling: Graph,
    node_fidelity: Vec<f64>,
    /// Indexed like `coupling.edges()`.
    edge_fidelity: Vec<f64>,
}

fn check_range(what: impl FnOnce() -> String, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::FidelityRange {
            what: what(),
            value,
        })
    }
}

impl DeviceModel {
    /// `edge_fidelity` lists `(u, v, f)` for every coupling edge, in any order.
    pub fn new(
        coupling: Graph,
        node_fidelity: Vec<f64>,
        edge_fidelity: &[(VertexId, VertexId, f64)],
    ) -> Result<Self> {
        if node_fidelity.len() != coupling.vertex_count() {
            return Err(Error::MissingFidelity(format!(
                "{} of {} nodes",
                coupling.vertex_count().saturating_sub(node_fidelity.len()),
                coupling.vertex_count()
            )));
        }
        for (v, &f) in node_fidelity.iter().enumerate() {
            check_range(|| format!("node {v}"), f)?;
        }
        let mut edges = vec![f64::NAN; coupling.edge_count()];
        for &(u, v, f) in edge_fidelity {
            check_range(|| format!("edge ({u}, {v})"), f)?;
            let e = coupling.edge_index(u, v).ok_or_else(|| {
                Error::InvalidArgument(format!("({u}, {v}) is not a coupling edge"))
            })?;
            edges[e] = f;
        }
        if let Some(e) = edges.iter().position(|f| f.is_nan()) {
            let (u, v) = coupling.edges()[e];
            return Err(Error::MissingFidelity(format!("edge ({u}, {v})")));
        }
        Ok(DeviceModel {
            coupling,
            node_fidelity,
            edge_fidelity: edges,
        })
    }

    /// Every node and coupling at fidelity `f`.
    pub fn uniform(coupling: Graph, f: f64) -> Result<Self> {
        check_range(|| "uniform".into(), f)?;
        Ok(DeviceModel {
            node_fidelity: vec![f; coupling.vertex_count()],
            edge_fidelity: vec![f; coupling.edge_count()],
            coupling,
        })
    }

    pub fn coupling(&self) -> &Graph {
        &self.coupling
    }

    #[inline]
    pub fn node_fidelity(&self, v: VertexId) -> f64 {
        self.node_fidelity[v as usize]
    }

    /// Fidelity of coupling `{u, v}`, if the coupling exists.
    #[inline]
    pub fn edge_fidelity(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.coupling
            .edge_index(u, v)
            .map(|e| self.edge_fidelity[e])
    }

    pub fn set_node_fidelity(&mut self, v: VertexId, f: f64) -> Result<()> {
        check_range(|| format!("node {v}"), f)?;
        self.node_fidelity[v as usize] = f;
        Ok(())
    }

    pub fn set_edge_fidelity(&mut self, u: VertexId, v: VertexId, f: f64) -> Result<()> {
        check_range(|| format!("edge ({u}, {v})"), f)?;
        let e = self
            .coupling
            .edge_index(u, v)
            .ok_or_else(|| Error::InvalidArgument(format!("({u}, {v}) is not a coupling edge")))?;
        self.edge_fidelity[e] = f;
        Ok(())
    }

    /// Product over distinct row vertices and over the images of `edges`.
    pub fn score(&self, row: &[VertexId], edges: &[(VertexId, VertexId)]) -> Result<f64> {
        let mut distinct = row.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let mut score: f64 = distinct.iter().map(|&v| self.node_fidelity(v)).product();
        for &(i, j) in edges {
            let (u, v) = (row[i as usize], row[j as usize]);
            score *= self
                .edge_fidelity(u, v)
                .ok_or_else(|| Error::MissingFidelity(format!("edge ({u}, {v})")))?;
        }
        Ok(score)
    }

    /// Writes the device in the text format [`load_device`] reads.
    pub fn to_text(&self) -> String {
        let mut out = format!("nodes {}\n", self.coupling.vertex_count());
        for (v, f) in self.node_fidelity.iter().enumerate() {
            out.push_str(&format!("node {v} {f}\n"));
        }
        for (&(u, v), f) in self.coupling.edges().iter().zip(&self.edge_fidelity) {
            out.push_str(&format!("edge {u} {v} {f}\n"));
        }
        out
    }
}

/// Reads a device file: `nodes N`, then `node <id> <fidelity>` for every
/// qubit, then `edge <u> <v> <fidelity>` for every coupling. `#` comments.
pub fn load_device(path: impl AsRef<Path>) -> Result<DeviceModel> {
    let path = path.as_ref();
    parse_device(&std::fs::read_to_string(path)?, path)
}

pub fn parse_device(text: &str, origin: &Path) -> Result<DeviceModel> {
    let bad = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut count: Option<usize> = None;
    let mut nodes: Vec<Option<f64>> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let index = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| bad(line_no, format!("invalid vertex id `{s}`")))
        };
        let fidelity = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| bad(line_no, format!("invalid fidelity `{s}`")))
        };
        match (tokens[0], count) {
            ("nodes", None) if tokens.len() == 2 => {
                let n = index(tokens[1])?;
                count = Some(n);
                nodes = vec![None; n];
            }
            ("nodes", Some(_)) => return Err(bad(line_no, "repeated `nodes` header".into())),
            (_, None) => return Err(bad(line_no, "expected `nodes N` header first".into())),
            ("node", Some(n)) if tokens.len() == 3 => {
                let v = index(tokens[1])?;
                if v >= n {
                    return Err(bad(line_no, format!("node {v} out of range")));
                }
                let f = fidelity(tokens[2])?;
                check_range(|| format!("node {v}"), f)?;
                if nodes[v].replace(f).is_some() {
                    return Err(bad(line_no, format!("node {v} listed twice")));
                }
            }
            ("edge", Some(n)) if tokens.len() == 4 => {
                let (u, v) = (index(tokens[1])?, index(tokens[2])?);
                if u >= n || v >= n || u == v {
                    return Err(bad(line_no, format!("invalid edge ({u}, {v})")));
                }
                let f = fidelity(tokens[3])?;
                check_range(|| format!("edge ({u}, {v})"), f)?;
                edges.push((u as VertexId, v as VertexId, f));
            }
            _ => return Err(bad(line_no, format!("unrecognized line `{line}`"))),
        }
    }
    let n = count.ok_or_else(|| bad(1, "missing `nodes N` header".into()))?;
    let coupling = Graph::new(n, edges.iter().map(|&(u, v, _)| (u as usize, v as usize)))?;
    if coupling.edge_count() != edges.len() {
        return Err(bad(0, "coupling listed twice".into()));
    }
    let node_fidelity = nodes
        .iter()
        .enumerate()
        .map(|(v, f)| f.ok_or_else(|| Error::MissingFidelity(format!("node {v}"))))
        .collect::<Result<Vec<_>>>()?;
    DeviceModel::new(coupling, node_fidelity, &edges)
}

/// Scores every motif table of `db` against `device`.
pub fn attach_scores(db: &MotifDatabase, device: &DeviceModel) -> Result<MotifDatabase> {
    if db.fingerprint() != device.coupling().fingerprint() {
        return Err(Error::InvalidArgument(
            "database was not built over the device coupling graph".into(),
        ));
    }
    let mut scored = db.clone();
    let motifs = db.motifs().clone();
    for (name, table) in scored.tables_mut() {
        let motif = motifs.get(name).expect("tables follow the motif set");
        let edges = motif.template().edges();
        let scores = table
            .rows()
            .map(|row| device.score(row, edges))
            .collect::<Result<Vec<_>>>()?;
        *table = std::mem::replace(table, EmbeddingTable::new(Vec::new())?).with_scores(scores)?;
    }
    Ok(scored)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LayoutTiming {
    /// Decomposition and join-and-filter, excluding score arithmetic.
    pub generation_seconds: f64,
    /// Score corrections during joins plus ranking.
    pub scoring_seconds: f64,
    pub other_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ScoredLayouts {
    /// Every layout, one column per pattern vertex, with a score column.
    pub table: EmbeddingTable,
    /// Row indices, best first: descending score, ties by ascending row.
    pub ranking: Vec<usize>,
    pub top_k: usize,
    pub timing: LayoutTiming,
}

impl ScoredLayouts {
    pub fn score(&self, row: usize) -> f64 {
        self.table.scores().expect("scored")[row]
    }

    /// Best `top_k` layouts as `(row, score)`.
    pub fn top(&self) -> impl Iterator<Item = (&[VertexId], f64)> + '_ {
        self.ranking
            .iter()
            .take(self.top_k)
            .map(|&i| (self.table.row(i), self.score(i)))
    }

    /// The best `top_k` layouts as a table, in rank order.
    pub fn top_table(&self) -> EmbeddingTable {
        let mut data = Vec::new();
        let mut scores = Vec::new();
        for (row, s) in self.top() {
            data.extend_from_slice(row);
            scores.push(s);
        }
        EmbeddingTable::from_flat(self.table.columns().to_vec(), data, Some(scores))
            .expect("same shape")
    }
}

fn correct_join(device: &DeviceModel, slice: &Slice, table: &mut EmbeddingTable) -> Result<()> {
    let position = |v: VertexId| -> Result<usize> {
        table
            .column_index(v as ColumnId)
            .ok_or_else(|| Error::Table(format!("joined table lacks column {v}")))
    };
    let shared = slice
        .shared_vertices()
        .map(position)
        .collect::<Result<Vec<_>>>()?;
    let recovered = slice
        .recovered_edges
        .iter()
        .map(|&(u, v)| Ok((position(u)?, position(v)?)))
        .collect::<Result<Vec<_>>>()?;
    let arity = table.arity();
    let data = table.data().to_vec();
    let scores = table.scores_mut().expect("scored");
    for (row, score) in data.chunks_exact(arity).zip(scores.iter_mut()) {
        let mut surplus = 1.0;
        for &c in &shared {
            surplus *= device.node_fidelity(row[c]);
        }
        for &(a, b) in &recovered {
            surplus *= device
                .edge_fidelity(row[a], row[b])
                .ok_or_else(|| Error::MissingFidelity(format!("edge ({}, {})", row[a], row[b])))?;
        }
        *score /= surplus;
    }
    Ok(())
}

/// Enumerates layouts of `pattern` with incrementally propagated scores and
/// ranks them. An empty result is not an error.
pub fn select_layouts(
    pattern: &Graph,
    db: &MotifDatabase,
    device: &DeviceModel,
    top_k: usize,
) -> Result<ScoredLayouts> {
    if top_k == 0 {
        return Err(Error::InvalidArgument("top_k must be positive".into()));
    }
    if let Some((name, _)) = db.tables().find(|(_, t)| t.scores().is_none()) {
        return Err(Error::MissingScores(name.to_string()));
    }
    let correction_nanos = AtomicU64::new(0);
    let correction = |slice: &Slice, table: &mut EmbeddingTable| -> Result<()> {
        let start = Instant::now();
        let r = correct_join(device, slice, table);
        correction_nanos.fetch_add(start.elapsed().as_nanos() as u64, Ordering::Relaxed);
        r
    };
    let result = query(pattern, db, MatchMode::Monomorphism, Some(&correction))?;
    let correction_seconds = correction_nanos.load(Ordering::Relaxed) as f64 * 1e-9;

    let rank_start = Instant::now();
    let mut table = result.table;
    if table.scores().is_none() {
        // no slices carried scores (single-vertex pattern)
        let scores = table
            .rows()
            .map(|row| device.score(row, pattern.edges()))
            .collect::<Result<Vec<_>>>()?;
        table = table.with_scores(scores)?;
    }
    let scores = table.scores().expect("scored");
    let mut ranking: Vec<usize> = (0..table.len()).collect();
    ranking.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| table.row(a).cmp(table.row(b)))
    });
    let ranking_seconds = rank_start.elapsed().as_secs_f64();

    Ok(ScoredLayouts {
        timing: LayoutTiming {
            generation_seconds: (result.compute_seconds
                - result.decompose_seconds
                - correction_seconds)
                .max(0.0),
            scoring_seconds: correction_seconds + ranking_seconds,
            other_seconds: result.decompose_seconds,
        },
        table,
        ranking,
        top_k,
    })
}
