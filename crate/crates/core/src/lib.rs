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

//! Subgraph isomorphism enumeration by motif decomposition.
//!
//! A pattern graph is cut into a sequence of overlapping motif slices
//! ([`decompose`]). Every motif's embeddings in the data graph are kept as a
//! columnar [`EmbeddingTable`] inside a [`MotifDatabase`]. The pattern's
//! embeddings are then rebuilt by joining those tables on the vertices
//! slices share and dropping rows where two pattern vertices collide
//! ([`delta_motif`]). A classic backtracking matcher ([`vf2`]) serves both as
//! the slice finder during decomposition and as the reference enumerator.
//!
//! ```
//! use delta_motif::{build_database, count_matches, Graph, MatchMode, MotifSet};
//!
//! let data = Graph::complete(4);
//! let db = build_database(&data, &MotifSet::parse("M3,M2")?)?;
//! let triangle = Graph::complete(3);
//! let report = count_matches(&triangle, &db, MatchMode::Monomorphism)?;
//! assert_eq!(report.count, 24);
//! # Ok::<(), delta_motif::Error>(())
//! ```

pub mod decompose;
pub mod engine;
pub mod error;
pub mod graph;
pub mod layout;
pub mod motif;
pub mod table;
pub mod vf2;

pub use decompose::{decompose, validate, Decomposition, Slice, ValidationReport};
pub use engine::{
    build_database, count_matches, delta_motif, load_database, save_database, EngineConfig,
    MatchReport, MotifDatabase,
};
pub use error::{Error, Result};
pub use graph::{make_graph, Graph, VertexId};
pub use layout::{attach_scores, load_device, select_layouts, DeviceModel, ScoredLayouts};
pub use motif::{builtin_motif, custom_motif, default_motif_set, Motif, MotifSet, Topology};
pub use table::{
    dedup_canonical, filter_overlaps, inner_join, sort_rows, ColumnId, EmbeddingTable,
    JoinConstraint,
};
pub use vf2::{vf2_enumerate, vf2_first, MatchMode};
