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

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use delta_motif::engine::delta_motif_detailed;
use delta_motif::graph::{
    heavy_hex, heavy_hex_dims_for, load_graph, random_connected_subgraph, square_grid,
    write_edge_list, GraphFormat,
};
use delta_motif::motif::CATALOG;
use delta_motif::table::write_csv;
use delta_motif::{
    attach_scores, build_database, builtin_motif, default_motif_set, load_database, load_device,
    save_database, select_layouts, sort_rows, vf2_enumerate, Graph, MotifDatabase, Topology,
};
use serde::Serialize;

use crate::{BuildDbArgs, Engine, EnumerateArgs, GenerateArgs, Lattice, LayoutArgs, MotifsArgs};

pub(crate) fn read_graph(path: &Path) -> Result<Graph> {
    let loaded = load_graph(path, GraphFormat::from_path(path))
        .with_context(|| format!("reading {}", path.display()))?;
    if loaded.dropped_self_loops + loaded.duplicate_entries > 0 {
        log::info!(
            "{}: dropped {} self-loops and {} duplicate edges",
            path.display(),
            loaded.dropped_self_loops,
            loaded.duplicate_entries
        );
    }
    Ok(loaded.graph)
}

/// The lattice whose vertex count is close to `size`, with a short name.
pub(crate) fn lattice(topology: Lattice, size: usize) -> (Graph, String) {
    match topology {
        Lattice::HeavyHex => {
            let (r, c) = heavy_hex_dims_for(size);
            (heavy_hex(r, c), format!("heavy-hex-{r}x{c}"))
        }
        Lattice::SquareGrid => {
            let rows = ((size as f64).sqrt().round() as usize).max(1);
            let cols = ((size + rows / 2) / rows).max(1);
            (
                square_grid(rows, cols),
                format!("square-grid-{rows}x{cols}"),
            )
        }
    }
}

pub(crate) fn default_set(topology: Lattice) -> delta_motif::MotifSet {
    default_motif_set(match topology {
        Lattice::HeavyHex => Topology::HeavyHex,
        Lattice::SquareGrid => Topology::SquareGrid,
    })
}

/// Opens `path` for writing, or standard output when absent.
pub(crate) fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_database(dir: &Path, graph: &Graph) -> Result<MotifDatabase> {
    load_database(dir, graph).with_context(|| format!("loading database from {}", dir.display()))
}

pub(crate) fn enumerate(args: &EnumerateArgs) -> Result<()> {
    let data = read_graph(&args.data)?;
    let pattern = read_graph(&args.pattern)?;
    let mode = args.mode.into();
    let (table, prep, decompose, compute) = match args.engine {
        Engine::Vf2 => {
            let start = Instant::now();
            let table = vf2_enumerate(&pattern, &data, mode, None);
            (table, 0.0, 0.0, start.elapsed().as_secs_f64())
        }
        Engine::Delta => {
            let db = match &args.db {
                Some(dir) => open_database(dir, &data)?,
                None => build_database(&data, &args.motifs)?,
            };
            // a loaded database carries no build cost for this run
            let prep = if args.db.is_some() {
                0.0
            } else {
                db.prep_seconds()
            };
            let r = delta_motif_detailed(&pattern, &db, mode)?;
            (r.table, prep, r.decompose_seconds, r.compute_seconds)
        }
    };
    if let Some(path) = &args.out {
        let mut out = output(Some(path))?;
        write_csv(&sort_rows(&table), &mut out)?;
        out.flush()?;
    }
    println!("count {}", table.len());
    println!("prep_seconds {prep:.6}");
    println!("decompose_seconds {decompose:.6}");
    println!("compute_seconds {compute:.6}");
    println!("total_seconds {:.6}", prep + compute);
    Ok(())
}

pub(crate) fn build_db(args: &BuildDbArgs) -> Result<()> {
    let data = read_graph(&args.data)?;
    let db = build_database(&data, &args.motifs)?;
    save_database(&db, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    for motif in db.motifs().motifs() {
        let rows = db.table(motif.name()).map_or(0, |t| t.len());
        let secs = db.build_seconds().get(motif.name()).copied().unwrap_or(0.0);
        println!("{} rows {rows} seconds {secs:.6}", motif.name());
    }
    println!("total_seconds {:.6}", db.prep_seconds());
    Ok(())
}

#[derive(Serialize)]
struct LayoutReport {
    layouts: usize,
    top_k: usize,
    prep_seconds: f64,
    generation_seconds: f64,
    scoring_seconds: f64,
    other_seconds: f64,
    total_seconds: f64,
}

pub(crate) fn layout(args: &LayoutArgs) -> Result<()> {
    let device =
        load_device(&args.device).with_context(|| format!("reading {}", args.device.display()))?;
    let pattern = read_graph(&args.pattern)?;
    let start = Instant::now();
    let db = match &args.db {
        Some(dir) => open_database(dir, device.coupling())?,
        None => build_database(device.coupling(), &args.motifs)?,
    };
    let scored = attach_scores(&db, &device)?;
    let prep_seconds = start.elapsed().as_secs_f64();
    let layouts = select_layouts(&pattern, &scored, &device, args.top_k)?;

    let mut out = output(args.out.as_deref())?;
    write_csv(&layouts.top_table(), &mut out)?;
    out.flush()?;
    let t = layouts.timing;
    let report = LayoutReport {
        layouts: layouts.table.len(),
        top_k: args.top_k,
        prep_seconds,
        generation_seconds: t.generation_seconds,
        scoring_seconds: t.scoring_seconds,
        other_seconds: t.other_seconds,
        total_seconds: prep_seconds + t.generation_seconds + t.scoring_seconds + t.other_seconds,
    };
    let json = serde_json::to_string_pretty(&report)?;
    match &args.timing {
        Some(path) => std::fs::write(path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => eprintln!("{json}"),
    }
    Ok(())
}

pub(crate) fn generate(args: &GenerateArgs) -> Result<()> {
    let (graph, _) = lattice(args.topology, args.size);
    let graph = match args.pattern_size {
        Some(k) => random_connected_subgraph(&graph, k, args.seed)?.pattern,
        None => graph,
    };
    let mut out = output(args.out.as_deref())?;
    write_edge_list(&graph, &mut out)?;
    out.flush()?;
    Ok(())
}

pub(crate) fn motifs(args: &MotifsArgs) -> Result<()> {
    if let Some(dir) = &args.export {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut out = io::stdout().lock();
    for name in CATALOG {
        let m = builtin_motif(name)?;
        writeln!(
            out,
            "{name:<8} vertices {:>2} edges {:>2}",
            m.size(),
            m.template().edge_count()
        )?;
        if let Some(dir) = &args.export {
            let path = dir.join(format!("{name}.txt"));
            let mut file = BufWriter::new(
                File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            );
            write_edge_list(m.template(), &mut file)?;
            file.flush()?;
        }
    }
    for t in [Topology::HeavyHex, Topology::SquareGrid, Topology::Generic] {
        writeln!(out, "default {t:?}: {}", default_motif_set(t))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sizes_are_near_the_request() {
        let (g, name) = lattice(Lattice::SquareGrid, 100);
        assert_eq!(
            (g.vertex_count(), name.as_str()),
            (100, "square-grid-10x10")
        );
        let (g, _) = lattice(Lattice::SquareGrid, 1600);
        assert_eq!(g.vertex_count(), 1600);
        let (g, _) = lattice(Lattice::SquareGrid, 1);
        assert_eq!(g.vertex_count(), 1);
        let (g, name) = lattice(Lattice::HeavyHex, 1990);
        assert!(
            g.vertex_count().abs_diff(1990) < 40,
            "{name}: {}",
            g.vertex_count()
        );
    }
}
