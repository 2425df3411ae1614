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

use std::path::Path;

use delta_motif::graph::{erdos_renyi, load_graph, parse_graph, write_edge_list, GraphFormat};
use delta_motif::Graph;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn edge_list(text: &str) -> Graph {
    parse_graph(text, GraphFormat::EdgeList, Path::new("mem"))
        .unwrap()
        .graph
}

proptest! {
    #[test]
    fn line_order_and_orientation_do_not_matter(n in 2usize..40, p in 0.05f64..0.6, seed in any::<u64>()) {
        let g = erdos_renyi(n, p, seed);
        // keep the top vertex so both texts imply the same vertex count
        let mut lines: Vec<String> = g.edges().iter().map(|&(u, v)| format!("{v} {u}")).collect();
        lines.push(format!("{} {}", n - 1, n - 1));
        lines.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut written = Vec::new();
        write_edge_list(&g, &mut written).unwrap();
        let mut reference = String::from_utf8(written).unwrap();
        reference.push_str(&format!("{} {}\n", n - 1, n - 1));

        let shuffled = parse_graph(&lines.join("\n"), GraphFormat::EdgeList, Path::new("mem")).unwrap();
        prop_assert_eq!(&shuffled.graph, &edge_list(&reference));
        prop_assert_eq!(&shuffled.graph, &g);
        prop_assert_eq!(shuffled.dropped_self_loops, 1);
    }

    #[test]
    fn matrix_market_agrees_with_edge_list(n in 2usize..30, p in 0.05f64..0.6, seed in any::<u64>()) {
        let g = erdos_renyi(n, p, seed);
        let mut mtx = format!("%%MatrixMarket matrix coordinate pattern symmetric\n{n} {n} {}\n", g.edge_count());
        for &(u, v) in g.edges() {
            mtx.push_str(&format!("{} {}\n", v + 1, u + 1));
        }
        let loaded = parse_graph(&mtx, GraphFormat::MatrixMarket, Path::new("mem")).unwrap();
        prop_assert_eq!(loaded.graph, g);
    }
}

#[test]
fn files_are_read_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("g.txt");
    let mtx = dir.path().join("g.mtx");
    std::fs::write(&txt, "a b\nb c\n").unwrap();
    std::fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate pattern general\n3 3 2\n1 2\n2 3\n",
    )
    .unwrap();
    let a = load_graph(&txt, GraphFormat::from_path(&txt)).unwrap();
    let b = load_graph(&mtx, GraphFormat::from_path(&mtx)).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_eq!(a.labels.unwrap(), ["a", "b", "c"]);
    assert!(load_graph(dir.path().join("missing.txt"), GraphFormat::EdgeList).is_err());
}
