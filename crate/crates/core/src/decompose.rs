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

//! Greedy decomposition of a pattern into overlapping motif slices.
//!
//! Each round looks for one new slice. Motifs are tried largest first (ties
//! by name), and a slice must map one of its template edges onto an
//! uncovered pattern edge (the anchor) that touches a vertex already in some
//! earlier slice. Anchors are tried in sorted edge order, and each motif is
//! seeded once per orbit of oriented template edges under its automorphism
//! group. The first match wins.
//!
//! After a slice is taken, its template edges are marked covered. Its
//! vertices that still have uncovered incident edges become boundary
//! vertices. The rest are dropped from the pattern that later rounds search.
//! Slices may reuse already covered edges between live vertices; such edges
//! are listed in [`Slice::recovered_edges`]. `M2` always fits the anchor, so
//! every round covers at least one edge and the loop ends.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::motif::{Motif, MotifSet};
use crate::table::JoinConstraint;
use crate::vf2::{automorphisms, Vf2};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slice {
    pub motif: String,
    /// `assignment[slot]` is the pattern vertex the motif slot lands on.
    pub assignment: Vec<VertexId>,
    /// Template edges as slot pairs.
    pub motif_edges: Vec<(VertexId, VertexId)>,
    /// One constraint per vertex shared with earlier slices, in pattern ids
    /// (`left == right`, since both sides are named by pattern vertex).
    pub constraints: Vec<JoinConstraint>,
    /// Pattern edges of this slice that an earlier slice already covered.
    pub recovered_edges: Vec<(VertexId, VertexId)>,
    /// Slice vertices left with uncovered edges after this slice.
    pub boundary: Vec<VertexId>,
}

impl Slice {
    pub fn vertices(&self) -> &[VertexId] {
        &self.assignment
    }

    pub fn shared_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.constraints.iter().map(|c| c.left)
    }

    /// Pattern edges covered by this slice's template edges, as `(u, v)` with `u < v`.
    pub fn edge_images(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.motif_edges.iter().map(|&(i, j)| {
            let (a, b) = (self.assignment[i as usize], self.assignment[j as usize]);
            (a.min(b), a.max(b))
        })
    }

    pub fn slot_of(&self, v: VertexId) -> Option<usize> {
        self.assignment.iter().position(|&x| x == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub pattern_vertex_count: usize,
    pub slices: Vec<Slice>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Number of joins needed to assemble the pattern.
    pub fn join_count(&self) -> usize {
        self.slices.len().saturating_sub(1)
    }

    /// Union of slice edge images, sorted.
    pub fn covered_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut all: Vec<_> = self.slices.iter().flat_map(|s| s.edge_images()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Slot-level form of slice `i`'s constraints: `(earlier slice, its slot, slot in slice i)`,
    /// pointing at the earliest slice holding each shared vertex.
    pub fn slot_constraints(&self, i: usize) -> Vec<(usize, usize, usize)> {
        let slice = &self.slices[i];
        slice
            .shared_vertices()
            .filter_map(|v| {
                let (j, earlier) = self.slices[..i]
                    .iter()
                    .enumerate()
                    .find(|(_, s)| s.slot_of(v).is_some())?;
                Some((j, earlier.slot_of(v)?, slice.slot_of(v)?))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Oriented template edges, one per orbit under the template's automorphisms.
fn seed_edges(motif: &Motif) -> Vec<(VertexId, VertexId)> {
    let group = automorphisms(motif.template());
    let mut seen: FxHashSet<(VertexId, VertexId)> = FxHashSet::default();
    let mut reps = Vec::new();
    for &(a, b) in motif.template().edges() {
        for (i, j) in [(a, b), (b, a)] {
            if seen.contains(&(i, j)) {
                continue;
            }
            reps.push((i, j));
            for perm in &group {
                seen.insert((perm[i as usize] as VertexId, perm[j as usize] as VertexId));
            }
        }
    }
    reps
}

pub fn decompose(pattern: &Graph, motifs: &MotifSet) -> Result<Decomposition> {
    if !pattern.is_connected() {
        return Err(Error::DisconnectedPattern);
    }
    if motifs.get("M2").is_none() {
        return Err(Error::InvalidMotifSet("motif set must contain M2".into()));
    }
    let n = pattern.vertex_count();
    let seeds: Vec<Vec<(VertexId, VertexId)>> = motifs.motifs().iter().map(seed_edges).collect();

    let mut covered = vec![false; pattern.edge_count()];
    let mut uncovered_degree: Vec<usize> = (0..n as VertexId).map(|v| pattern.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut in_union = vec![false; n];
    let mut remaining = pattern.edge_count();
    let mut slices = Vec::new();
    // usable vertices only ever shrink, so a motif that cannot sit on an
    // anchor edge now never can: remember (motif, edge) misses
    let m = pattern.edge_count();
    let mut missed = vec![false; motifs.len() * m];

    while remaining > 0 {
        let mut anchors: Vec<(VertexId, VertexId)> = pattern
            .edges()
            .iter()
            .zip(&covered)
            .filter(|(&(a, b), &c)| {
                !c && (slices.is_empty() || in_union[a as usize] || in_union[b as usize])
            })
            .map(|(&e, _)| e)
            .collect();
        // edges closing onto the union first: they add constraints, not rows
        anchors.sort_by_key(|&(a, b)| !(in_union[a as usize] && in_union[b as usize]));
        let alive_count = alive.iter().filter(|&&a| a).count();
        let live_edges = remaining + covered_live_edges(pattern, &covered, &alive);

        let mut found = None;
        'search: for (mi, (motif, motif_seeds)) in motifs.motifs().iter().zip(&seeds).enumerate() {
            if motif.size() > alive_count || motif.template().edge_count() > live_edges {
                continue;
            }
            for &(a, b) in &anchors {
                let e = pattern.edge_index(a, b).expect("anchors are pattern edges");
                if missed[mi * m + e] {
                    continue;
                }
                for &(i, j) in motif_seeds {
                    for (x, y) in [(a, b), (b, a)] {
                        let hit = Vf2::new(motif.template(), pattern)
                            .restrict_to(&alive)
                            .seed(i, x)
                            .seed(j, y)
                            .first();
                        if let Some(mapping) = hit {
                            found = Some((motif, mapping));
                            break 'search;
                        }
                    }
                }
                missed[mi * m + e] = true;
            }
        }
        let (motif, assignment) = found.expect("M2 always fits an uncovered anchor edge");

        let mut constraints = Vec::new();
        for &v in &assignment {
            if in_union[v as usize] {
                constraints.push(JoinConstraint::new(v, v));
            }
        }
        let mut recovered_edges = Vec::new();
        for &(i, j) in motif.template().edges() {
            let (u, v) = (assignment[i as usize], assignment[j as usize]);
            let e = pattern
                .edge_index(u, v)
                .expect("slice edges are pattern edges");
            if covered[e] {
                recovered_edges.push((u.min(v), u.max(v)));
            } else {
                covered[e] = true;
                remaining -= 1;
                uncovered_degree[u as usize] -= 1;
                uncovered_degree[v as usize] -= 1;
            }
        }
        let mut boundary = Vec::new();
        for &v in &assignment {
            in_union[v as usize] = true;
            if uncovered_degree[v as usize] == 0 {
                alive[v as usize] = false;
            } else {
                boundary.push(v);
            }
        }
        slices.push(Slice {
            motif: motif.name().to_string(),
            motif_edges: motif.template().edges().to_vec(),
            assignment,
            constraints,
            recovered_edges,
            boundary,
        });
    }

    Ok(Decomposition {
        pattern_vertex_count: n,
        slices,
    })
}

fn covered_live_edges(pattern: &Graph, covered: &[bool], alive: &[bool]) -> usize {
    pattern
        .edges()
        .iter()
        .zip(covered)
        .filter(|(&(a, b), &c)| c && alive[a as usize] && alive[b as usize])
        .count()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks edge coverage, constraint consistency and that every slice maps its
/// template edges onto pattern edges.
pub fn validate(d: &Decomposition, pattern: &Graph) -> ValidationReport {
    let mut violations = Vec::new();
    let n = pattern.vertex_count();
    if d.pattern_vertex_count != n {
        violations.push(format!(
            "decomposition is for {} vertices, pattern has {n}",
            d.pattern_vertex_count
        ));
    }
    let mut union = vec![false; n];
    let mut covered = FxHashSet::default();
    for (k, slice) in d.slices.iter().enumerate() {
        let mut distinct = slice.assignment.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != slice.assignment.len() {
            violations.push(format!("slice {k}: assignment is not injective"));
        }
        if let Some(&v) = slice.assignment.iter().find(|&&v| v as usize >= n) {
            violations.push(format!("slice {k}: vertex {v} out of range"));
            continue;
        }
        for &(i, j) in &slice.motif_edges {
            let (Some(&u), Some(&v)) = (
                slice.assignment.get(i as usize),
                slice.assignment.get(j as usize),
            ) else {
                violations.push(format!(
                    "slice {k}: template edge ({i}, {j}) names a missing slot"
                ));
                continue;
            };
            if u == v || !pattern.has_edge(u, v) {
                violations.push(format!(
                    "slice {k}: template edge ({i}, {j}) maps to non-edge ({u}, {v})"
                ));
            } else {
                covered.insert((u.min(v), u.max(v)));
            }
        }

        let expected: FxHashSet<VertexId> = slice
            .assignment
            .iter()
            .copied()
            .filter(|&v| union[v as usize])
            .collect();
        let mut named = FxHashSet::default();
        for c in &slice.constraints {
            if c.left != c.right {
                violations.push(format!(
                    "slice {k}: constraint {}={} relates different vertices",
                    c.left, c.right
                ));
            }
            if !expected.contains(&c.left) {
                violations.push(format!(
                    "slice {k}: constraint on vertex {} which is not shared",
                    c.left
                ));
            }
            named.insert(c.left);
        }
        for v in expected.difference(&named) {
            violations.push(format!("slice {k}: shared vertex {v} has no constraint"));
        }
        if k > 0 && slice.constraints.is_empty() {
            violations.push(format!("slice {k}: no overlap with earlier slices"));
        }
        for &v in &slice.assignment {
            union[v as usize] = true;
        }
    }
    for &(u, v) in pattern.edges() {
        if !covered.contains(&(u, v)) {
            violations.push(format!("pattern edge ({u}, {v}) is not covered"));
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_connected_subgraph, square_grid};
    use crate::motif::default_motif_set;
    use crate::motif::Topology;
    use proptest::prelude::*;

    fn set(names: &[&str]) -> MotifSet {
        MotifSet::from_names(names).unwrap()
    }

    #[test]
    fn hexagon_with_m4() {
        let d = decompose(&Graph::cycle(6), &set(&["M4", "M2"])).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.slices.iter().all(|s| s.motif == "M4"));
        assert_eq!(d.slices[1].constraints.len(), 2);
        let mut slots: Vec<_> = d
            .slot_constraints(1)
            .into_iter()
            .map(|(_, a, b)| (a, b))
            .collect();
        slots.sort_unstable();
        // the two path ends meet the other path's ends
        assert!(
            slots == vec![(0, 0), (3, 3)] || slots == vec![(0, 3), (3, 0)],
            "{slots:?}"
        );
        assert!(validate(&d, &Graph::cycle(6)).is_ok());
    }

    #[test]
    fn m2_only_gives_one_slice_per_edge() {
        let g = square_grid(3, 3);
        let d = decompose(&g, &set(&["M2"])).unwrap();
        assert_eq!(d.len(), g.edge_count());
        assert_eq!(d.join_count(), g.edge_count() - 1);
    }

    #[test]
    fn single_edge() {
        let d = decompose(&Graph::path(2), &set(&["M4-O", "M3", "M2"])).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.slices[0].motif, "M2");
    }

    #[test]
    fn single_vertex_has_no_slices() {
        let d = decompose(&Graph::empty(1), &set(&["M2"])).unwrap();
        assert!(d.is_empty());
        assert!(validate(&d, &Graph::empty(1)).is_ok());
    }

    #[test]
    fn disconnected_pattern_rejected() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            decompose(&g, &set(&["M2"])),
            Err(Error::DisconnectedPattern)
        ));
    }

    #[test]
    fn cycle_slice_with_cycle_motif() {
        let d = decompose(&square_grid(2, 2), &set(&["M4-O", "M2"])).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.slices[0].motif, "M4-O");
    }

    #[test]
    fn validation_failures() {
        let g = Graph::cycle(6);
        let d = decompose(&g, &set(&["M4", "M2"])).unwrap();
        let mut dropped = d.clone();
        dropped.slices.pop();
        let report = validate(&dropped, &g);
        assert!(
            report.violations.iter().any(|v| v.contains("not covered")),
            "{report:?}"
        );

        let mut bad = d.clone();
        let stray = bad.slices[1]
            .assignment
            .iter()
            .copied()
            .find(|v| !bad.slices[0].assignment.contains(v))
            .unwrap();
        bad.slices[1]
            .constraints
            .push(JoinConstraint::new(stray, stray));
        let report = validate(&bad, &g);
        assert!(
            report.violations.iter().any(|v| v.contains("not shared")),
            "{report:?}"
        );

        let mut broken = d;
        broken.slices[0].assignment.swap(0, 2);
        assert!(!validate(&broken, &g).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let d = decompose(&Graph::cycle(6), &set(&["M4", "M2"])).unwrap();
        assert_eq!(Decomposition::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn seed_orbits() {
        let cycle = crate::motif::builtin_motif("M6-O").unwrap();
        assert_eq!(seed_edges(&cycle).len(), 1);
        let path = crate::motif::builtin_motif("M4").unwrap();
        // oriented edges of a 4-path: end-to-inner, inner-to-end, inner-to-inner
        assert_eq!(seed_edges(&path).len(), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn random_patterns_decompose_validly(size in 2usize..30, seed in any::<u64>(), which in 0usize..5) {
            let g = square_grid(12, 12);
            let pattern = random_connected_subgraph(&g, size, seed).unwrap().pattern;
            let motifs = match which {
                0 => set(&["M2"]),
                1 => set(&["M3", "M2"]),
                2 => set(&["M4", "M2"]),
                3 => set(&["M4-O", "M2"]),
                _ => default_motif_set(Topology::SquareGrid),
            };
            let d = decompose(&pattern, &motifs).unwrap();
            let report = validate(&d, &pattern);
            prop_assert!(report.is_ok(), "{:?}", report);
            if which == 0 {
                prop_assert_eq!(d.len(), pattern.edge_count());
            }
            for s in d.slices.iter().skip(1) {
                prop_assert!(!s.constraints.is_empty());
            }
        }
    }
}
