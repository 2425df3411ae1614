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

//! Lattice generators and random pattern sampling.
//!
//! # Heavy-hex construction
//!
//! `heavy_hex(rows, cols)` starts from a honeycomb laid out as a brick wall.
//! Honeycomb vertices sit at integer points `(i, j)` with `i` in `0..=rows`.
//! Hexagon `k` of hexagon row `i` spans columns `a..=a + 2` of vertex rows `i`
//! and `i + 1`, where `a = 2k + (i mod 2)`, so consecutive hexagon rows are
//! staggered by one column. Each hexagon contributes the four horizontal unit
//! edges along its top and bottom and the two vertical edges at columns `a`
//! and `a + 2`. Only points touched by some hexagon exist, so there are no
//! dangling corner vertices.
//!
//! Every honeycomb edge is then subdivided by one degree-2 vertex. Honeycomb
//! vertices get ids first in `(i, j)` order, subdivision vertices follow in
//! sorted honeycomb-edge order.
//!
//! With `r` rows and `c` columns the honeycomb has `2rc + 2r + 2c` vertices and
//! `3rc + 2r + 2c - 1` edges, so the heavy-hex lattice has `5rc + 4r + 4c - 1`
//! vertices. `(1, 1)` is a single 12-cycle. The two named presets hit 1990
//! (11 x 33) and 4485 (25 x 34) exactly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use super::{Graph, VertexId};
use crate::error::{Error, Result};

pub fn square_grid(rows: usize, cols: usize) -> Graph {
    assert!(rows >= 1 && cols >= 1, "grid dimensions must be positive");
    let id = |r: usize, c: usize| (r * cols + c) as VertexId;
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_normalized(rows * cols, edges)
}

pub fn heavy_hex_vertex_count(rows: usize, cols: usize) -> usize {
    5 * rows * cols + 4 * rows + 4 * cols - 1
}

pub fn heavy_hex(rows: usize, cols: usize) -> Graph {
    assert!(
        rows >= 1 && cols >= 1,
        "lattice dimensions must be positive"
    );
    let mut points: Vec<(usize, usize)> = Vec::new();
    let mut hex_edges: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for i in 0..rows {
        for k in 0..cols {
            let a = 2 * k + i % 2;
            for row in [i, i + 1] {
                hex_edges.push(((row, a), (row, a + 1)));
                hex_edges.push(((row, a + 1), (row, a + 2)));
                points.extend([(row, a), (row, a + 1), (row, a + 2)]);
            }
            hex_edges.push(((i, a), (i + 1, a)));
            hex_edges.push(((i, a + 2), (i + 1, a + 2)));
        }
    }
    points.sort_unstable();
    points.dedup();
    let index: FxHashMap<(usize, usize), VertexId> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as VertexId))
        .collect();

    let mut honeycomb: Vec<(VertexId, VertexId)> = hex_edges
        .iter()
        .map(|(p, q)| {
            let (u, v) = (index[p], index[q]);
            (u.min(v), u.max(v))
        })
        .collect();
    honeycomb.sort_unstable();
    honeycomb.dedup();

    let mut next = points.len() as VertexId;
    let mut edges = Vec::with_capacity(2 * honeycomb.len());
    for (u, v) in honeycomb {
        edges.push((u, next));
        edges.push((v, next));
        next += 1;
    }
    Graph::from_normalized(next as usize, edges)
}

/// Lattice dimensions whose vertex count is nearest to `target`, preferring the
/// most square shape among equally near candidates.
pub fn heavy_hex_dims_for(target: usize) -> (usize, usize) {
    let mut best = (1, 1);
    let mut best_key = (usize::MAX, usize::MAX);
    for rows in 1.. {
        if heavy_hex_vertex_count(rows, rows) > 2 * target + 16 {
            break;
        }
        // vertex count is increasing in cols; scan around the solution of the linear equation
        let per_col = 5 * rows + 4;
        let guess = (target + 1).saturating_sub(4 * rows) / per_col;
        for cols in guess.saturating_sub(1).max(rows)..=guess + 1 {
            let n = heavy_hex_vertex_count(rows, cols);
            let key = (n.abs_diff(target), cols - rows);
            if key < best_key {
                best_key = key;
                best = (rows, cols);
            }
        }
    }
    best
}

/// Named heavy-hex sizes used by the synthetic benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeavyHexPreset {
    Hh1990,
    Hh4485,
}

impl HeavyHexPreset {
    pub fn dims(self) -> (usize, usize) {
        match self {
            HeavyHexPreset::Hh1990 => (11, 33),
            HeavyHexPreset::Hh4485 => (25, 34),
        }
    }
}

pub fn heavy_hex_preset(preset: HeavyHexPreset) -> Graph {
    let (r, c) = preset.dims();
    heavy_hex(r, c)
}

/// G(n, p) with a seeded ChaCha8 stream; edges drawn in `(u, v)`, `u < v` order.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u as VertexId, v as VertexId));
            }
        }
    }
    Graph::from_normalized(n, edges)
}

/// A sampled pattern together with the embedding it was cut from:
/// pattern vertex `i` came from `witness[i]` in the source graph.
#[derive(Debug, Clone)]
pub struct SampledPattern {
    pub pattern: Graph,
    pub witness: Vec<VertexId>,
}

/// Samples a connected vertex-induced subgraph with exactly `size` vertices.
///
/// The start vertex is drawn uniformly from vertices whose component holds at
/// least `size` vertices. Each step then restarts the walk at a uniformly
/// chosen collected vertex and moves to a uniformly chosen neighbor, recording
/// vertices in first-visit order until `size` are collected. Restarting keeps
/// samples compact; a plain walk on a lattice leaves long one-vertex-wide arms
/// whose mapping counts grow exponentially with their length. All source edges
/// among the collected vertices are kept. Pattern ids follow first-visit
/// order. The stream is ChaCha8 seeded from `seed`, so results are
/// reproducible across platforms.
pub fn random_connected_subgraph(g: &Graph, size: usize, seed: u64) -> Result<SampledPattern> {
    if size == 0 {
        return Err(Error::Sampling {
            requested: size,
            reason: "size must be at least 1".into(),
        });
    }
    if size > g.vertex_count() {
        return Err(Error::Sampling {
            requested: size,
            reason: format!("graph has only {} vertices", g.vertex_count()),
        });
    }
    let (label, sizes) = g.components();
    let eligible: Vec<VertexId> = (0..g.vertex_count())
        .filter(|&v| sizes[label[v]] >= size)
        .map(|v| v as VertexId)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Some(&start) = eligible.choose(&mut rng) else {
        return Err(Error::Sampling {
            requested: size,
            reason: "no connected component is large enough".into(),
        });
    };

    let mut seen = vec![false; g.vertex_count()];
    let mut order = vec![start];
    seen[start as usize] = true;
    while order.len() < size {
        let from = order[rng.gen_range(0..order.len())];
        let next = *g
            .neighbors(from)
            .choose(&mut rng)
            .expect("component has at least two vertices");
        if !seen[next as usize] {
            seen[next as usize] = true;
            order.push(next);
        }
    }
    Ok(SampledPattern {
        pattern: g.induced_subgraph(&order),
        witness: order,
    })
}
