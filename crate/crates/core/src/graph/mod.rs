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

//! Undirected simple graphs with dense vertex ids.
//!
//! A [`Graph`] is immutable once built. Edges are stored once as `(u, v)` with
//! `u < v`, sorted, and mirrored into a CSR adjacency so that neighbor scans and
//! edge probes are cheap.

mod generators;
mod io;

pub use generators::{
    erdos_renyi, heavy_hex, heavy_hex_dims_for, heavy_hex_preset, heavy_hex_vertex_count,
    random_connected_subgraph, square_grid, HeavyHexPreset, SampledPattern,
};
pub use io::{load_graph, parse_graph, write_edge_list, GraphFormat, LoadedGraph};

use std::collections::VecDeque;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Dense zero-based vertex index.
pub type VertexId = u32;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(VertexId, VertexId)>,
    offsets: Vec<usize>,
    adjacency: Vec<VertexId>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("vertex_count", &self.vertex_count)
            .field("edges", &self.edges)
            .finish()
    }
}

/// Builds a graph, rejecting self-loops and out-of-range endpoints.
/// Reversed and repeated pairs collapse to a single undirected edge.
pub fn make_graph(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Graph> {
    Graph::new(vertex_count, edges.iter().copied())
}

impl Graph {
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if vertex_count > VertexId::MAX as usize {
            return Err(Error::InvalidGraph(format!(
                "{vertex_count} vertices exceeds the 32-bit id space"
            )));
        }
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint out of range for {vertex_count} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            normalized.push((a as VertexId, b as VertexId));
        }
        Ok(Self::from_normalized(vertex_count, normalized))
    }

    /// `edges` must already be in range, loop free and oriented `u < v`.
    pub(crate) fn from_normalized(
        vertex_count: usize,
        mut edges: Vec<(VertexId, VertexId)>,
    ) -> Self {
        edges.sort_unstable();
        edges.dedup();

        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..vertex_count].to_vec();
        let mut adjacency = vec![0; 2 * edges.len()];
        for &(u, v) in &edges {
            adjacency[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            adjacency[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..vertex_count {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph {
            vertex_count,
            edges,
            offsets,
            adjacency,
        }
    }

    pub fn empty(vertex_count: usize) -> Self {
        Self::from_normalized(vertex_count, Vec::new())
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n)
            .map(|i| ((i - 1) as VertexId, i as VertexId))
            .collect();
        Self::from_normalized(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n)
            .map(|i| ((i - 1) as VertexId, i as VertexId))
            .collect();
        edges.push((0, (n - 1) as VertexId));
        Self::from_normalized(n, edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u as VertexId, v as VertexId));
            }
        }
        Self::from_normalized(n, edges)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    #[inline]
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count as VertexId)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Index of edge `{u, v}` in [`Graph::edges`], if present.
    pub fn edge_index(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok()
    }

    /// Component label per vertex plus the size of each component.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.vertex_count {
            if label[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            label[start] = id;
            queue.push_back(start as VertexId);
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &w in self.neighbors(v) {
                    if label[w as usize] == usize::MAX {
                        label[w as usize] = id;
                        queue.push_back(w);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    /// True for graphs with exactly one component. The empty graph is not connected.
    pub fn is_connected(&self) -> bool {
        self.vertex_count > 0 && self.components().1.len() == 1
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> Graph {
        let mut local = rustc_hash::FxHashMap::default();
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i as VertexId);
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for w in self.neighbors(v) {
                if let Some(&j) = local.get(w) {
                    if (i as VertexId) < j {
                        edges.push((i as VertexId, j));
                    }
                }
            }
        }
        Graph::from_normalized(vertices.len(), edges)
    }

    /// Content hash over the vertex count and the sorted edge list. Independent
    /// of the order edges were supplied in.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.vertex_count as u64).to_le_bytes());
        hasher.update((self.edges.len() as u64).to_le_bytes());
        for &(u, v) in &self.edges {
            hasher.update(u.to_le_bytes());
            hasher.update(v.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangle() {
        let g = make_graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(2, 0));
        assert!(g.is_connected());
    }

    #[test]
    fn reversed_pair_is_deduplicated() {
        let g = make_graph(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn out_of_range_endpoint() {
        let err = make_graph(3, &[(0, 3)]).unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)), "{err}");
    }

    #[test]
    fn self_loop_rejected() {
        assert!(make_graph(3, &[(1, 1)]).is_err());
    }

    #[test]
    fn fingerprint_ignores_edge_order() {
        let a = make_graph(4, &[(0, 1), (2, 3), (1, 2)]).unwrap();
        let b = make_graph(4, &[(3, 2), (1, 0), (2, 1)]).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = make_graph(5, &[(0, 1), (2, 3), (1, 2)]).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn disconnected() {
        let g = make_graph(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.components().1, vec![2, 2]);
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric_and_simple(
            n in 1usize..20,
            raw in proptest::collection::vec((0usize..20, 0usize..20), 0..60),
        ) {
            let edges: Vec<_> = raw.into_iter().filter(|&(u, v)| u < n && v < n && u != v).collect();
            let g = make_graph(n, &edges).unwrap();
            for &(u, v) in g.edges() {
                prop_assert!(u < v);
                prop_assert!(g.has_edge(u, v) && g.has_edge(v, u));
            }
            let total: usize = (0..n as VertexId).map(|v| g.degree(v)).sum();
            prop_assert_eq!(total, 2 * g.edge_count());
            for &(u, v) in &edges {
                prop_assert!(g.has_edge(u as VertexId, v as VertexId));
            }
        }
    }
}
