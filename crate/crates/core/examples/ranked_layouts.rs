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

//! From an edge list to ranked layouts.
//!
//! Run with `cargo run --example ranked_layouts`.

use std::path::Path;

use delta_motif::graph::{parse_graph, GraphFormat};
use delta_motif::layout::parse_device;
use delta_motif::{attach_scores, build_database, select_layouts, MotifSet};

// a 2 x 3 block of qubits: 0-1-2 above 3-4-5
const DEVICE: &str = "\
nodes 6
node 0 0.999
node 1 0.998
node 2 0.990
node 3 0.997
node 4 0.995
node 5 0.980
edge 0 1 0.990
edge 1 2 0.970
edge 3 4 0.985
edge 4 5 0.960
edge 0 3 0.992
edge 1 4 0.975
edge 2 5 0.950
";

// a three-qubit line
const CIRCUIT: &str = "q0 q1\nq1 q2\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let device = parse_device(DEVICE, Path::new("device"))?;
    let pattern = parse_graph(CIRCUIT, GraphFormat::EdgeList, Path::new("circuit"))?;

    // motif embeddings are computed once per device and reused for every circuit
    let db = build_database(device.coupling(), &MotifSet::parse("M3,M2")?)?;
    let scored = attach_scores(&db, &device)?;

    let layouts = select_layouts(&pattern.graph, &scored, &device, 3)?;
    let labels = pattern.labels.unwrap_or_default();
    println!("{} layouts; best {}:", layouts.table.len(), layouts.top_k);
    for (row, score) in layouts.top() {
        let placed: Vec<String> = row
            .iter()
            .zip(&labels)
            .map(|(q, l)| format!("{l}->{q}"))
            .collect();
        println!("  {score:.6}  {}", placed.join(" "));
    }
    Ok(())
}
