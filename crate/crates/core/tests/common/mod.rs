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

//! Reference implementations shared by the integration tests. Nothing here
//! calls into the matcher or the join engine.

#![allow(dead_code)]

use delta_motif::{EmbeddingTable, Graph, VertexId};

/// Every injective map from pattern vertices to data vertices that preserves
/// pattern edges (and, when `induced`, pattern non-edges), as sorted rows.
///
/// Plain depth-first assignment in vertex-id order, checking each new vertex
/// against the ones already placed.
pub fn brute_force(pattern: &Graph, data: &Graph, induced: bool) -> Vec<Vec<VertexId>> {
    let n = data.vertex_count();
    let k = pattern.vertex_count();
    let mut adj = vec![false; n * n];
    for &(u, v) in data.edges() {
        adj[u as usize * n + v as usize] = true;
        adj[v as usize * n + u as usize] = true;
    }
    let mut padj = vec![false; k * k];
    for &(u, v) in pattern.edges() {
        padj[u as usize * k + v as usize] = true;
        padj[v as usize * k + u as usize] = true;
    }
    let mut out = Vec::new();
    let mut map: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; n];

    fn extend(
        i: usize,
        k: usize,
        n: usize,
        induced: bool,
        adj: &[bool],
        padj: &[bool],
        map: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<VertexId>>,
    ) {
        if i == k {
            out.push(map.iter().map(|&v| v as VertexId).collect());
            return;
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            let ok = (0..i).all(|j| {
                let data_edge = adj[map[j] * n + v];
                let pattern_edge = padj[j * k + i];
                if induced {
                    data_edge == pattern_edge
                } else {
                    !pattern_edge || data_edge
                }
            });
            if ok {
                used[v] = true;
                map.push(v);
                extend(i + 1, k, n, induced, adj, padj, map, used, out);
                map.pop();
                used[v] = false;
            }
        }
    }

    extend(0, k, n, induced, &adj, &padj, &mut map, &mut used, &mut out);
    out.sort();
    out
}

/// Rows of a table whose columns are `0..arity`, sorted.
pub fn sorted_rows(t: &EmbeddingTable) -> Vec<Vec<VertexId>> {
    let expected: Vec<u32> = (0..t.arity() as u32).collect();
    assert_eq!(
        t.columns(),
        &expected[..],
        "columns are not in pattern-vertex order"
    );
    let mut rows: Vec<Vec<VertexId>> = t.rows().map(|r| r.to_vec()).collect();
    rows.sort();
    rows
}

/// Number of automorphisms of `g`, by brute force.
pub fn automorphism_count(g: &Graph) -> usize {
    brute_force(g, g, true).len()
}

/// Relative difference, safe at zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
