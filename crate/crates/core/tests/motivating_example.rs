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

//! The worked example: a 6-cycle matched in a 7-vertex graph with {M4, M2}.

mod common;

use std::path::Path;

use delta_motif::graph::{load_graph, GraphFormat};
use delta_motif::{
    build_database, decompose, delta_motif, filter_overlaps, inner_join, sort_rows, vf2_enumerate,
    Graph, MatchMode, MotifSet,
};

fn fixture(name: &str) -> Graph {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    load_graph(path, GraphFormat::EdgeList).unwrap().graph
}

fn setup() -> (Graph, Graph, MotifSet) {
    (
        fixture("motivating_data.txt"),
        fixture("hexagon_pattern.txt"),
        MotifSet::parse("M4,M2").unwrap(),
    )
}

#[test]
fn fixtures_have_the_drawn_shape() {
    let (data, pattern, _) = setup();
    assert_eq!((data.vertex_count(), data.edge_count()), (7, 9));
    assert_eq!(pattern, Graph::cycle(6));
}

#[test]
fn two_m4_slices_meet_at_both_ends() {
    let (_, pattern, motifs) = setup();
    let d = decompose(&pattern, &motifs).unwrap();
    assert_eq!(d.len(), 2);
    assert!(d.slices.iter().all(|s| s.motif == "M4"));
    assert!(d.slices[0].constraints.is_empty());
    assert_eq!(d.slices[1].constraints.len(), 2);
    assert!(d.slices[1].recovered_edges.is_empty());

    // the slices share exactly their endpoints; which end of the second
    // path lands on which end of the first depends on slot numbering
    let (s0, s1) = (&d.slices[0].assignment, &d.slices[1].assignment);
    let sorted = |mut v: Vec<u32>| {
        v.sort_unstable();
        v
    };
    let ends = sorted(vec![s0[0], s0[3]]);
    assert_eq!(sorted(vec![s1[0], s1[3]]), ends);
    assert_eq!(
        sorted(d.slices[1].constraints.iter().map(|c| c.left).collect()),
        ends
    );
    assert!(s1[1..3].iter().all(|v| !s0.contains(v)));
}

#[test]
fn result_equals_the_reference_matcher() {
    let (data, pattern, motifs) = setup();
    let db = build_database(&data, &motifs).unwrap();
    let got = delta_motif(&pattern, &db, MatchMode::Monomorphism).unwrap();
    let want = vf2_enumerate(&pattern, &data, MatchMode::Monomorphism, None);
    assert_eq!(sort_rows(&got), sort_rows(&want));
    assert_eq!(
        common::sorted_rows(&got),
        common::brute_force(&pattern, &data, false)
    );
    // the rim plus one detour through the hub per hub pair, 12 mappings each
    assert_eq!(got.len(), 48);
}

#[test]
fn filter_drops_rows_the_join_lets_through() {
    let (data, pattern, motifs) = setup();
    let db = build_database(&data, &motifs).unwrap();
    let d = decompose(&pattern, &motifs).unwrap();
    let m4 = db.table("M4").unwrap();
    let named = |i: usize| {
        let a = d.slices[i].assignment.clone();
        m4.clone()
            .rename_columns(move |slot| a[slot as usize])
            .unwrap()
    };
    let joined = inner_join(&named(0), &named(1), &d.slices[1].constraints).unwrap();
    let kept = filter_overlaps(&joined);
    // a path glued to its own reversal passes both keys but reuses its middle
    assert!(
        kept.len() < joined.len(),
        "{} raw rows, {} kept",
        joined.len(),
        kept.len()
    );
    let order: Vec<u32> = (0..6).collect();
    let want = vf2_enumerate(&pattern, &data, MatchMode::Monomorphism, None);
    assert_eq!(sort_rows(&kept.project(&order).unwrap()), sort_rows(&want));
}
