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

//! Depth-first backtracking matcher in the VF2 family.
//!
//! Pattern vertices are matched in a fixed order: after any seeded vertices,
//! the next vertex is the unmatched one with the most already-ordered
//! neighbors, ties broken by higher degree and then lower id. A vertex with an
//! ordered neighbor draws candidates from the data neighbors of that
//! neighbor's image; otherwise every data vertex is a candidate.
//!
//! A candidate `v` for pattern vertex `u` is feasible when it is unused and
//! allowed, `deg(v) >= deg(u)`, every already-matched neighbor of `u` maps to
//! a neighbor of `v`, and `v` has at least as many unmatched neighbors as `u`.
//! Induced mode additionally requires `v` to have no matched neighbors beyond
//! the images of `u`'s matched neighbors.

use std::ops::ControlFlow;

use crate::graph::{Graph, VertexId};
use crate::table::{ColumnId, EmbeddingTable};

const NIL: VertexId = VertexId::MAX;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum MatchMode {
    /// Injective maps preserving pattern edges; extra data edges are allowed.
    #[default]
    Monomorphism,
    /// Injective maps preserving both edges and non-edges.
    Induced,
}

impl std::str::FromStr for MatchMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "mono" | "monomorphism" => Ok(MatchMode::Monomorphism),
            "induced" => Ok(MatchMode::Induced),
            other => Err(crate::Error::InvalidArgument(format!(
                "unknown match mode `{other}`"
            ))),
        }
    }
}

/// Partial injective map between pattern and data vertices.
struct MatchState {
    pattern_to_data: Vec<VertexId>,
    data_to_pattern: Vec<VertexId>,
}

impl MatchState {
    fn new(pattern_n: usize, data_n: usize) -> Self {
        MatchState {
            pattern_to_data: vec![NIL; pattern_n],
            data_to_pattern: vec![NIL; data_n],
        }
    }

    #[inline]
    fn assign(&mut self, u: VertexId, v: VertexId) {
        self.pattern_to_data[u as usize] = v;
        self.data_to_pattern[v as usize] = u;
    }

    #[inline]
    fn unassign(&mut self, u: VertexId, v: VertexId) {
        self.pattern_to_data[u as usize] = NIL;
        self.data_to_pattern[v as usize] = NIL;
    }
}

struct Step {
    vertex: VertexId,
    /// Earlier-ordered neighbor used to generate candidates.
    parent: Option<VertexId>,
    /// All earlier-ordered neighbors.
    back: Vec<VertexId>,
    seed: Option<VertexId>,
}

/// Configurable search of `pattern` inside `data`.
pub struct Vf2<'a> {
    pattern: &'a Graph,
    data: &'a Graph,
    mode: MatchMode,
    allowed: Option<&'a [bool]>,
    seeds: Vec<(VertexId, VertexId)>,
}

impl<'a> Vf2<'a> {
    pub fn new(pattern: &'a Graph, data: &'a Graph) -> Self {
        Vf2 {
            pattern,
            data,
            mode: MatchMode::Monomorphism,
            allowed: None,
            seeds: Vec::new(),
        }
    }

    pub fn mode(mut self, mode: MatchMode) -> Self {
        self.mode = mode;
        self
    }

    /// Only data vertices with `allowed[v]` may be used.
    pub fn restrict_to(mut self, allowed: &'a [bool]) -> Self {
        assert_eq!(allowed.len(), self.data.vertex_count());
        self.allowed = Some(allowed);
        self
    }

    /// Forces pattern vertex `u` onto data vertex `v`.
    pub fn seed(mut self, u: VertexId, v: VertexId) -> Self {
        self.seeds.push((u, v));
        self
    }

    fn plan(&self) -> Vec<Step> {
        let n = self.pattern.vertex_count();
        let mut placed = vec![false; n];
        let mut ordered_neighbors = vec![0usize; n];
        let mut order: Vec<(VertexId, Option<VertexId>)> = Vec::with_capacity(n);
        for &(u, v) in &self.seeds {
            if !placed[u as usize] {
                order.push((u, Some(v)));
                placed[u as usize] = true;
                for &w in self.pattern.neighbors(u) {
                    ordered_neighbors[w as usize] += 1;
                }
            }
        }
        while order.len() < n {
            let next = (0..n as VertexId)
                .filter(|&u| !placed[u as usize])
                .max_by(|&a, &b| {
                    ordered_neighbors[a as usize]
                        .cmp(&ordered_neighbors[b as usize])
                        .then(self.pattern.degree(a).cmp(&self.pattern.degree(b)))
                        .then(b.cmp(&a))
                })
                .unwrap();
            placed[next as usize] = true;
            for &w in self.pattern.neighbors(next) {
                ordered_neighbors[w as usize] += 1;
            }
            order.push((next, None));
        }

        let mut position = vec![usize::MAX; n];
        for (i, &(u, _)) in order.iter().enumerate() {
            position[u as usize] = i;
        }
        order
            .iter()
            .enumerate()
            .map(|(i, &(u, seed))| {
                let back: Vec<VertexId> = self
                    .pattern
                    .neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&w| position[w as usize] < i)
                    .collect();
                // the neighbor with the smallest data degree would be ideal; earliest is stable
                let parent = back.iter().copied().min_by_key(|&w| position[w as usize]);
                Step {
                    vertex: u,
                    parent,
                    back,
                    seed,
                }
            })
            .collect()
    }

    /// Calls `visit` with each complete mapping (indexed by pattern vertex)
    /// until it returns `Break`. Returns the number of mappings visited.
    pub fn for_each(&self, mut visit: impl FnMut(&[VertexId]) -> ControlFlow<()>) -> usize {
        let n = self.pattern.vertex_count();
        if n == 0 || n > self.data.vertex_count() {
            return 0;
        }
        let steps = self.plan();
        let mut state = MatchState::new(n, self.data.vertex_count());
        let mut found = 0;
        let _ = self.descend(&steps, 0, &mut state, &mut |m| {
            found += 1;
            visit(m)
        });
        found
    }

    fn descend(
        &self,
        steps: &[Step],
        depth: usize,
        state: &mut MatchState,
        visit: &mut dyn FnMut(&[VertexId]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if depth == steps.len() {
            return visit(&state.pattern_to_data);
        }
        let step = &steps[depth];
        let u = step.vertex;
        let mut try_candidate = |v: VertexId, state: &mut MatchState| -> ControlFlow<()> {
            if self.feasible(step, v, state) {
                state.assign(u, v);
                let flow = self.descend(steps, depth + 1, state, visit);
                state.unassign(u, v);
                flow
            } else {
                ControlFlow::Continue(())
            }
        };
        match (step.seed, step.parent) {
            (Some(v), _) => try_candidate(v, state),
            (None, Some(p)) => {
                let anchor = state.pattern_to_data[p as usize];
                for &v in self.data.neighbors(anchor) {
                    try_candidate(v, state)?;
                }
                ControlFlow::Continue(())
            }
            (None, None) => {
                for v in 0..self.data.vertex_count() as VertexId {
                    try_candidate(v, state)?;
                }
                ControlFlow::Continue(())
            }
        }
    }

    #[inline]
    fn feasible(&self, step: &Step, v: VertexId, state: &MatchState) -> bool {
        if v as usize >= self.data.vertex_count() || state.data_to_pattern[v as usize] != NIL {
            return false;
        }
        if let Some(allowed) = self.allowed {
            if !allowed[v as usize] {
                return false;
            }
        }
        let u = step.vertex;
        let pattern_degree = self.pattern.degree(u);
        let data_degree = self.data.degree(v);
        if data_degree < pattern_degree {
            return false;
        }
        for &w in &step.back {
            if !self.data.has_edge(v, state.pattern_to_data[w as usize]) {
                return false;
            }
        }
        let matched_data_neighbors = self
            .data
            .neighbors(v)
            .iter()
            .filter(|&&x| state.data_to_pattern[x as usize] != NIL)
            .count();
        if self.mode == MatchMode::Induced && matched_data_neighbors != step.back.len() {
            return false;
        }
        data_degree - matched_data_neighbors >= pattern_degree - step.back.len()
    }

    pub fn first(&self) -> Option<Vec<VertexId>> {
        let mut out = None;
        self.for_each(|m| {
            out = Some(m.to_vec());
            ControlFlow::Break(())
        });
        out
    }

    /// All mappings, or the first `limit`, one row per mapping and one column
    /// per pattern vertex.
    pub fn enumerate(&self, limit: Option<usize>) -> EmbeddingTable {
        let columns: Vec<ColumnId> = (0..self.pattern.vertex_count() as ColumnId).collect();
        let mut data = Vec::new();
        let mut rows = 0usize;
        if limit != Some(0) {
            self.for_each(|m| {
                data.extend_from_slice(m);
                rows += 1;
                if Some(rows) == limit {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
        }
        EmbeddingTable::from_flat(columns, data, None).expect("rows have pattern arity")
    }

    pub fn count(&self) -> usize {
        self.for_each(|_| ControlFlow::Continue(()))
    }
}

pub fn vf2_enumerate(
    pattern: &Graph,
    data: &Graph,
    mode: MatchMode,
    limit: Option<usize>,
) -> EmbeddingTable {
    Vf2::new(pattern, data).mode(mode).enumerate(limit)
}

pub fn vf2_first(pattern: &Graph, data: &Graph, mode: MatchMode) -> Option<Vec<VertexId>> {
    Vf2::new(pattern, data).mode(mode).first()
}

/// Automorphism group of `g` as vertex permutations, identity included.
pub fn automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    vf2_enumerate(g, g, MatchMode::Induced, None)
        .rows()
        .map(|r| r.iter().map(|&v| v as usize).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{erdos_renyi, square_grid};
    use crate::table::sort_rows;
    use proptest::prelude::*;

    /// Every injective map, filtered afterwards. No pruning at all.
    fn brute_force(pattern: &Graph, data: &Graph, mode: MatchMode) -> Vec<Vec<VertexId>> {
        fn rec(
            k: usize,
            n: usize,
            m: usize,
            cur: &mut Vec<VertexId>,
            used: &mut [bool],
            out: &mut Vec<Vec<VertexId>>,
        ) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for v in 0..m {
                if !used[v] {
                    used[v] = true;
                    cur.push(v as VertexId);
                    rec(k, n, m, cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        let mut all = Vec::new();
        let m = data.vertex_count();
        rec(
            pattern.vertex_count(),
            m,
            m,
            &mut Vec::new(),
            &mut vec![false; m],
            &mut all,
        );
        all.retain(|f| {
            let n = f.len() as VertexId;
            (0..n).all(|a| {
                (a + 1..n).all(|b| {
                    let p = pattern.has_edge(a, b);
                    let d = data.has_edge(f[a as usize], f[b as usize]);
                    match mode {
                        MatchMode::Monomorphism => !p || d,
                        MatchMode::Induced => p == d,
                    }
                })
            })
        });
        all.sort();
        all
    }

    fn rows(t: &EmbeddingTable) -> Vec<Vec<VertexId>> {
        sort_rows(t).rows().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn triangle_on_triangle() {
        let k3 = Graph::complete(3);
        assert_eq!(
            vf2_enumerate(&k3, &k3, MatchMode::Monomorphism, None).len(),
            6
        );
        assert_eq!(automorphisms(&k3).len(), 6);
    }

    #[test]
    fn edge_on_triangle() {
        let t = vf2_enumerate(
            &Graph::path(2),
            &Graph::complete(3),
            MatchMode::Monomorphism,
            None,
        );
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn no_induced_square_in_k4() {
        let t = vf2_enumerate(
            &Graph::cycle(4),
            &Graph::complete(4),
            MatchMode::Induced,
            None,
        );
        assert!(t.is_empty());
        let mono = vf2_enumerate(
            &Graph::cycle(4),
            &Graph::complete(4),
            MatchMode::Monomorphism,
            None,
        );
        assert_eq!(
            mono.len(),
            brute_force(
                &Graph::cycle(4),
                &Graph::complete(4),
                MatchMode::Monomorphism
            )
            .len()
        );
    }

    #[test]
    fn first_match_cases() {
        let f = vf2_first(&Graph::path(4), &Graph::cycle(6), MatchMode::Monomorphism).unwrap();
        let c6 = Graph::cycle(6);
        assert!(f.windows(2).all(|w| c6.has_edge(w[0], w[1])));
        assert!(vf2_first(
            &Graph::complete(3),
            &square_grid(6, 6),
            MatchMode::Monomorphism
        )
        .is_none());
        assert!(vf2_first(&Graph::path(2), &Graph::path(2), MatchMode::Monomorphism).is_some());
    }

    #[test]
    fn limit_stops_early() {
        let t = vf2_enumerate(
            &Graph::path(2),
            &Graph::complete(5),
            MatchMode::Monomorphism,
            Some(7),
        );
        assert_eq!(t.len(), 7);
        assert!(vf2_enumerate(
            &Graph::path(2),
            &Graph::complete(5),
            MatchMode::Monomorphism,
            Some(0)
        )
        .is_empty());
    }

    #[test]
    fn seeds_and_mask() {
        let c6 = Graph::cycle(6);
        let p3 = Graph::path(3);
        let seeded = Vf2::new(&p3, &c6).seed(0, 2).seed(1, 3).enumerate(None);
        assert_eq!(rows(&seeded), vec![vec![2, 3, 4]]);
        let mut allowed = vec![true; 6];
        allowed[4] = false;
        assert!(Vf2::new(&p3, &c6)
            .seed(0, 2)
            .seed(1, 3)
            .restrict_to(&allowed)
            .first()
            .is_none());
        // infeasible seed pair (not an edge)
        assert!(Vf2::new(&p3, &c6).seed(0, 0).seed(1, 3).first().is_none());
    }

    #[test]
    fn pattern_larger_than_data() {
        assert!(vf2_enumerate(
            &Graph::path(5),
            &Graph::path(3),
            MatchMode::Monomorphism,
            None
        )
        .is_empty());
    }

    fn small_pattern() -> impl Strategy<Value = Graph> {
        (1usize..=6, proptest::collection::vec(any::<bool>(), 15)).prop_map(|(n, bits)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::new(n, edges).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_brute_force(
            pattern in small_pattern(),
            n in 1usize..=12,
            p in 0.1f64..0.7,
            seed in any::<u64>(),
            induced in any::<bool>(),
        ) {
            let data = erdos_renyi(n, p, seed);
            let mode = if induced { MatchMode::Induced } else { MatchMode::Monomorphism };
            let got = rows(&vf2_enumerate(&pattern, &data, mode, None));
            prop_assert_eq!(got, brute_force(&pattern, &data, mode));
        }
    }
}
