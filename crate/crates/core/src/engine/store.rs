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

//! On-disk motif databases.
//!
//! A database is a directory holding `manifest.json` plus one binary table
//! file per motif (layout in [`crate::table::write_binary`]). The manifest
//! records the data graph fingerprint, every motif's template, its table file
//! and build time. Loading checks the fingerprint against the graph the
//! caller supplies and refuses stale caches.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{index_table, MotifDatabase};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::motif::{builtin_motif, custom_motif, Motif, MotifSet};
use crate::table::{read_binary, write_binary};

pub const MANIFEST_FILE: &str = "manifest.json";
const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    fingerprint: String,
    vertex_count: usize,
    edge_count: usize,
    motifs: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestEntry {
    name: String,
    vertex_count: usize,
    edges: Vec<(u32, u32)>,
    file: String,
    rows: usize,
    build_seconds: f64,
}

pub fn save_database(db: &MotifDatabase, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for (i, motif) in db.motifs().motifs().iter().enumerate() {
        let table = db
            .table(motif.name())
            .ok_or_else(|| Error::InvalidMotifSet(format!("no table for `{}`", motif.name())))?;
        let file = format!("table-{i:02}.bin");
        write_binary(table, BufWriter::new(File::create(dir.join(&file))?))?;
        entries.push(ManifestEntry {
            name: motif.name().to_string(),
            vertex_count: motif.size(),
            edges: motif.template().edges().to_vec(),
            file,
            rows: table.len(),
            build_seconds: db.build_seconds().get(motif.name()).copied().unwrap_or(0.0),
        });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        fingerprint: db.fingerprint().to_string(),
        vertex_count: db.graph().vertex_count(),
        edge_count: db.graph().edge_count(),
        motifs: entries,
    };
    fs::write(
        dir.join(MANIFEST_FILE),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

pub fn load_database(dir: impl AsRef<Path>, graph: &Graph) -> Result<MotifDatabase> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path)?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::corrupt(&manifest_path, e.to_string()))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(Error::corrupt(
            &manifest_path,
            format!("unsupported version {}", manifest.version),
        ));
    }
    let actual = graph.fingerprint();
    if manifest.fingerprint != actual {
        return Err(Error::FingerprintMismatch {
            stored: manifest.fingerprint,
            actual,
        });
    }

    let mut motifs = Vec::new();
    let mut tables = BTreeMap::new();
    let mut indexes = BTreeMap::new();
    let mut build_seconds = BTreeMap::new();
    for entry in manifest.motifs {
        let template = Graph::new(
            entry.vertex_count,
            entry.edges.iter().map(|&(u, v)| (u as usize, v as usize)),
        )
        .map_err(|e| Error::corrupt(&manifest_path, e.to_string()))?;
        let motif = resolve_motif(&entry.name, template)?;
        let path = dir.join(&entry.file);
        let table = read_binary(BufReader::new(File::open(&path)?), &path)?;
        if table.arity() != motif.size() || table.len() != entry.rows {
            return Err(Error::corrupt(
                &path,
                format!(
                    "table shape {}x{} does not match manifest {}x{}",
                    table.len(),
                    table.arity(),
                    entry.rows,
                    motif.size()
                ),
            ));
        }
        let index = index_table(&table, graph).map_err(|e| Error::corrupt(&path, e.to_string()))?;
        indexes.insert(entry.name.clone(), index);
        tables.insert(entry.name.clone(), table);
        build_seconds.insert(entry.name.clone(), entry.build_seconds);
        motifs.push(motif);
    }
    let motifs = MotifSet::new(motifs)?;
    Ok(MotifDatabase::from_parts(
        Arc::new(graph.clone()),
        motifs,
        tables,
        indexes,
        build_seconds,
    ))
}

/// Catalog motifs must match their catalog template; anything else is custom.
fn resolve_motif(name: &str, template: Graph) -> Result<Motif> {
    match builtin_motif(name) {
        Ok(m) if m.template() == &template => Ok(m),
        Ok(_) => Err(Error::InvalidMotif {
            name: name.into(),
            reason: "stored template differs from the catalog".into(),
        }),
        Err(_) => custom_motif(name, template),
    }
}
