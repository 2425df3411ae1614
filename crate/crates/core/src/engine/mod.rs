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

//! Motif databases and the join-and-filter query loop.
//!
//! A [`MotifDatabase`] holds, for one data graph, the embedding table of every
//! motif in a motif set. `M2` is seeded directly from the edge list, both
//! orientations per edge. Larger motifs are built in ascending size order by
//! running the query loop on their own template against the motifs already
//! present.
//!
//! A query decomposes the pattern, renames each slice's motif table from slot
//! ids to pattern vertex ids, and folds the slices left to right: the first
//! slice's table becomes the running result, and every later slice is joined
//! in on its shared vertices and filtered for vertex collisions. Unscored
//! queries run the same joins pipelined (see `walk`), so intermediate tables
//! are never materialized; scored queries keep whole tables between joins
//! because score corrections apply per slice.

mod store;
mod walk;

pub use store::{load_database, save_database, MANIFEST_FILE};

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use crate::decompose::{decompose, Decomposition, Slice};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::motif::{Motif, MotifSet};
use crate::table::{join_indexed_into, Buffers, ColumnId, EmbeddingTable, SlotIndex};
use crate::vf2::MatchMode;

/// Environment variable overriding [`EngineConfig::row_limit`].
pub const ROW_LIMIT_ENV: &str = "DELTA_MOTIF_MAX_ROWS";
/// Environment variable overriding [`EngineConfig::cell_limit`].
pub const CELL_LIMIT_ENV: &str = "DELTA_MOTIF_MAX_CELLS";
pub const DEFAULT_ROW_LIMIT: usize = 1 << 27;
/// 1 GiB of vertex ids per table.
pub const DEFAULT_CELL_LIMIT: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest number of rows any intermediate or final table may hold.
    pub row_limit: usize,
    /// Largest number of vertex ids (rows times columns) a table may hold.
    pub cell_limit: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            row_limit: DEFAULT_ROW_LIMIT,
            cell_limit: DEFAULT_CELL_LIMIT,
        }
    }
}

impl EngineConfig {
    /// Defaults, with each limit taken from the environment when set.
    pub fn from_env() -> Self {
        let var = |name, default| {
            std::env::var(name)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(default)
        };
        EngineConfig {
            row_limit: var(ROW_LIMIT_ENV, DEFAULT_ROW_LIMIT),
            cell_limit: var(CELL_LIMIT_ENV, DEFAULT_CELL_LIMIT),
        }
    }

    /// Row cap for tables of `arity` columns: the tighter of the two limits.
    pub fn rows_for(&self, arity: usize) -> usize {
        self.row_limit.min(self.cell_limit / arity.max(1))
    }
}

#[derive(Debug, Clone)]
pub struct MotifDatabase {
    graph: Arc<Graph>,
    fingerprint: String,
    motifs: MotifSet,
    tables: BTreeMap<String, EmbeddingTable>,
    indexes: BTreeMap<String, Arc<SlotIndex>>,
    build_seconds: BTreeMap<String, f64>,
    config: EngineConfig,
    /// Join buffers kept warm between queries.
    scratch: Arc<Mutex<Option<Buffers>>>,
}

/// Largest join buffer kept between queries, in vertex ids (1 GiB). Reusing
/// already-faulted pages is a large share of query time on big outputs.
const SCRATCH_KEEP: usize = 1 << 28;

impl MotifDatabase {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn motifs(&self) -> &MotifSet {
        &self.motifs
    }

    pub fn table(&self, motif: &str) -> Option<&EmbeddingTable> {
        self.tables.get(motif)
    }

    pub fn tables(&self) -> impl Iterator<Item = (&str, &EmbeddingTable)> {
        self.tables.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn build_seconds(&self) -> &BTreeMap<String, f64> {
        &self.build_seconds
    }

    /// Sum of per-motif build times.
    pub fn prep_seconds(&self) -> f64 {
        self.build_seconds.values().sum()
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn set_config(&mut self, config: EngineConfig) {
        self.config = config;
    }

    /// Frees the join buffer kept warm from earlier queries.
    /// Keeps a finished result's buffer for the next query.
    fn recycle(&self, table: EmbeddingTable) {
        let (data, _) = table.into_buffers();
        if data.capacity() > SCRATCH_KEEP {
            return;
        }
        if let Ok(mut slot) = self.scratch.lock() {
            if slot
                .as_ref()
                .is_none_or(|b| b.data.capacity() < data.capacity())
            {
                *slot = Some(Buffers {
                    data,
                    scores: Vec::new(),
                });
            }
        }
    }

    pub fn release_scratch(&self) {
        if let Ok(mut slot) = self.scratch.lock() {
            *slot = None;
        }
    }

    /// True when every table carries a score column.
    pub fn is_scored(&self) -> bool {
        self.tables.values().all(|t| t.scores().is_some())
    }

    pub(crate) fn tables_mut(&mut self) -> impl Iterator<Item = (&String, &mut EmbeddingTable)> {
        self.tables.iter_mut()
    }

    pub(crate) fn from_parts(
        graph: Arc<Graph>,
        motifs: MotifSet,
        tables: BTreeMap<String, EmbeddingTable>,
        indexes: BTreeMap<String, Arc<SlotIndex>>,
        build_seconds: BTreeMap<String, f64>,
    ) -> Self {
        MotifDatabase {
            fingerprint: graph.fingerprint(),
            graph,
            motifs,
            tables,
            indexes,
            build_seconds,
            config: EngineConfig::from_env(),
            scratch: Arc::default(),
        }
    }
}

pub(crate) fn index_table(table: &EmbeddingTable, data: &Graph) -> Result<Arc<SlotIndex>> {
    SlotIndex::new(table, data.vertex_count()).map(Arc::new)
}

/// Both orientations of every data edge, columns `[0, 1]`.
pub fn edge_table(data: &Graph) -> EmbeddingTable {
    let mut rows = Vec::with_capacity(4 * data.edge_count());
    for &(u, v) in data.edges() {
        rows.extend_from_slice(&[u, v, v, u]);
    }
    EmbeddingTable::from_flat(vec![0, 1], rows, None).expect("two columns")
}

pub fn build_database(data: &Graph, motifs: &MotifSet) -> Result<MotifDatabase> {
    build_database_with(data, motifs, EngineConfig::from_env())
}

pub fn build_database_with(
    data: &Graph,
    motifs: &MotifSet,
    config: EngineConfig,
) -> Result<MotifDatabase> {
    let start = Instant::now();
    let m2 = motifs
        .get("M2")
        .ok_or_else(|| Error::InvalidMotifSet("motif set must contain M2".into()))?;
    let seed = edge_table(data);
    if seed.len() > config.rows_for(2) {
        return Err(Error::MemoryBudget {
            context: "motif M2".into(),
            rows: seed.len(),
            limit: config.rows_for(2),
        });
    }
    let mut tables = BTreeMap::new();
    let mut indexes = BTreeMap::new();
    let mut build_seconds = BTreeMap::new();
    indexes.insert("M2".to_string(), index_table(&seed, data)?);
    tables.insert("M2".to_string(), seed);
    build_seconds.insert("M2".to_string(), start.elapsed().as_secs_f64());

    let mut ascending: Vec<&Motif> = motifs
        .motifs()
        .iter()
        .filter(|m| m.name() != "M2")
        .collect();
    ascending.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.name().cmp(b.name())));

    let mut built = vec![m2.clone()];
    for motif in ascending {
        let start = Instant::now();
        let available = MotifSet::new(built.clone())?;
        let decomposition = decompose(motif.template(), &available)?;
        let table = run_pipeline(
            motif.template(),
            &decomposition,
            &tables,
            &indexes,
            data,
            MatchMode::Monomorphism,
            config,
            None,
            None,
        )
        .map_err(|e| match e {
            Error::MemoryBudget { rows, limit, .. } => Error::MemoryBudget {
                context: format!("motif {}", motif.name()),
                rows,
                limit,
            },
            other => other,
        })?
        .table;
        indexes.insert(motif.name().to_string(), index_table(&table, data)?);
        tables.insert(motif.name().to_string(), table);
        build_seconds.insert(motif.name().to_string(), start.elapsed().as_secs_f64());
        built.push(motif.clone());
    }

    let mut db = MotifDatabase::from_parts(
        Arc::new(data.clone()),
        motifs.clone(),
        tables,
        indexes,
        build_seconds,
    );
    db.config = config;
    Ok(db)
}

/// Adjusts the scores of a freshly joined table for slice `slice`.
pub(crate) type ScoreCorrection<'a> =
    &'a (dyn Fn(&Slice, &mut EmbeddingTable) -> Result<()> + Sync);

#[derive(Debug, Clone, Default)]
pub struct PipelineStats {
    pub slices: usize,
    pub joins: usize,
    /// Largest table held at any step.
    pub peak_rows: usize,
    /// Rows that met join keys but failed the overlap filter, summed over joins.
    pub filtered_rows: usize,
}

pub(crate) struct PipelineOutput {
    pub table: EmbeddingTable,
    pub stats: PipelineStats,
}

fn motif_entry<'a>(
    slice: &Slice,
    tables: &'a BTreeMap<String, EmbeddingTable>,
    indexes: &'a BTreeMap<String, Arc<SlotIndex>>,
) -> Result<(&'a EmbeddingTable, &'a SlotIndex)> {
    let missing = || Error::InvalidMotifSet(format!("database has no table for `{}`", slice.motif));
    let table = tables.get(&slice.motif).ok_or_else(missing)?;
    let index = indexes.get(&slice.motif).ok_or_else(missing)?;
    Ok((table, index))
}

pub(crate) fn run_pipeline(
    pattern: &Graph,
    decomposition: &Decomposition,
    tables: &BTreeMap<String, EmbeddingTable>,
    indexes: &BTreeMap<String, Arc<SlotIndex>>,
    data: &Graph,
    mode: MatchMode,
    config: EngineConfig,
    correction: Option<ScoreCorrection<'_>>,
    scratch: Option<&Mutex<Option<Buffers>>>,
) -> Result<PipelineOutput> {
    let n = pattern.vertex_count();
    let mut stats = PipelineStats {
        slices: decomposition.len(),
        joins: decomposition.join_count(),
        ..Default::default()
    };
    let Some((first, rest)) = decomposition.slices.split_first() else {
        // a lone vertex maps anywhere
        let table = EmbeddingTable::from_flat(
            vec![0],
            (0..data.vertex_count() as VertexId).collect(),
            None,
        )?;
        stats.peak_rows = table.len();
        return Ok(PipelineOutput { table, stats });
    };

    let (table, _) = motif_entry(first, tables, indexes)?;
    if correction.is_none() && !rest.is_empty() {
        let mut bound = vec![false; n];
        for &v in &first.assignment {
            bound[v as usize] = true;
        }
        let steps = rest
            .iter()
            .map(|slice| {
                let (t, index) = motif_entry(slice, tables, indexes)?;
                walk::Step::new(slice, t, index, &mut bound)
            })
            .collect::<Result<Vec<_>>>()?;
        if bound.contains(&false) {
            return Err(Error::Join(
                "decomposition leaves pattern vertices uncovered".into(),
            ));
        }
        let spare = scratch
            .and_then(|m| m.lock().ok()?.take())
            .unwrap_or_default();
        let limit = config.rows_for(n);
        let out = walk::walk(
            table,
            &first.assignment,
            &steps,
            n,
            data.vertex_count(),
            limit,
            spare.data,
        );
        if out.rows > limit {
            return Err(Error::MemoryBudget {
                context: "join".into(),
                rows: out.rows,
                limit,
            });
        }
        stats.filtered_rows = out.rejected;
        stats.peak_rows = table.len().max(out.rows);
        let order: Vec<ColumnId> = (0..n as ColumnId).collect();
        let mut table = EmbeddingTable::from_flat(order, out.data, None)?;
        if mode == MatchMode::Induced {
            table = induced_filter(pattern, data, &table);
        }
        return Ok(PipelineOutput { table, stats });
    }
    let assignment = &first.assignment;
    let mut result = table
        .clone()
        .rename_columns(|slot| assignment[slot as usize])?;
    stats.peak_rows = result.len();
    let mut spare = scratch
        .and_then(|m| m.lock().ok()?.take())
        .unwrap_or_default();
    let order: Vec<ColumnId> = (0..n as ColumnId).collect();
    for (i, slice) in rest.iter().enumerate() {
        // the last join writes rows straight into pattern-vertex order
        let last = (i + 1 == rest.len()).then_some(&order[..]);
        let (table, index) = motif_entry(slice, tables, indexes)?;
        let (joined, join_stats) = join_indexed_into(
            &result,
            table,
            index,
            &slice.assignment,
            &slice.constraints,
            // intermediates never have more columns than the pattern has vertices
            config.rows_for(n),
            last,
            spare,
        )?;
        let (data, scores) = std::mem::replace(&mut result, joined).into_buffers();
        spare = Buffers {
            data,
            scores: scores.unwrap_or_default(),
        };
        if let Some(correct) = correction {
            if result.scores().is_some() {
                correct(slice, &mut result)?;
            }
        }
        stats.filtered_rows += join_stats.raw_rows - join_stats.kept_rows;
        stats.peak_rows = stats.peak_rows.max(result.len());
        log::trace!(
            "joined {} ({} constraints): {} raw, {} kept",
            slice.motif,
            slice.constraints.len(),
            join_stats.raw_rows,
            join_stats.kept_rows
        );
    }

    if let Some(m) = scratch {
        if spare.data.capacity() <= SCRATCH_KEEP {
            if let Ok(mut slot) = m.lock() {
                *slot = Some(spare);
            }
        }
    }
    let mut table = result.into_projection(&order)?;
    if mode == MatchMode::Induced {
        table = induced_filter(pattern, data, &table);
    }
    Ok(PipelineOutput { table, stats })
}

/// Keeps rows whose image spans no data edge beyond the pattern's own.
/// Rows are already edge-preserving, so counting image edges suffices.
fn induced_filter(pattern: &Graph, data: &Graph, t: &EmbeddingTable) -> EmbeddingTable {
    let m = pattern.edge_count();
    let mut image: Vec<VertexId> = Vec::with_capacity(t.arity());
    let mut data_out = Vec::new();
    let mut scores_out = Vec::new();
    for (i, row) in t.rows().enumerate() {
        image.clear();
        image.extend_from_slice(row);
        image.sort_unstable();
        let mut twice = 0usize;
        for &v in row {
            twice += data
                .neighbors(v)
                .iter()
                .filter(|w| image.binary_search(w).is_ok())
                .count();
        }
        if twice == 2 * m {
            data_out.extend_from_slice(row);
            if let Some(s) = t.scores() {
                scores_out.push(s[i]);
            }
        }
    }
    let scores = t.scores().map(|_| scores_out);
    EmbeddingTable::from_flat(t.columns().to_vec(), data_out, scores).expect("same shape")
}

#[derive(Debug, Clone)]
pub struct QueryResult {
    pub table: EmbeddingTable,
    pub decomposition: Decomposition,
    pub decompose_seconds: f64,
    /// Decomposition plus join-and-filter.
    pub compute_seconds: f64,
    pub stats: PipelineStats,
}

pub(crate) fn query(
    pattern: &Graph,
    db: &MotifDatabase,
    mode: MatchMode,
    correction: Option<ScoreCorrection<'_>>,
) -> Result<QueryResult> {
    let start = Instant::now();
    let decomposition = decompose(pattern, &db.motifs)?;
    let decompose_seconds = start.elapsed().as_secs_f64();
    let out = run_pipeline(
        pattern,
        &decomposition,
        &db.tables,
        &db.indexes,
        &db.graph,
        mode,
        db.config,
        correction,
        Some(&db.scratch),
    )?;
    Ok(QueryResult {
        table: out.table,
        decomposition,
        decompose_seconds,
        compute_seconds: start.elapsed().as_secs_f64(),
        stats: out.stats,
    })
}

/// All mappings of `pattern` into the database's graph under `mode`, one
/// column per pattern vertex in id order. Row order is unspecified.
pub fn delta_motif(pattern: &Graph, db: &MotifDatabase, mode: MatchMode) -> Result<EmbeddingTable> {
    delta_motif_detailed(pattern, db, mode).map(|r| r.table)
}

/// [`delta_motif`] with its decomposition, timings and join statistics.
pub fn delta_motif_detailed(
    pattern: &Graph,
    db: &MotifDatabase,
    mode: MatchMode,
) -> Result<QueryResult> {
    query(pattern, db, mode, None)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct MatchReport {
    pub count: usize,
    /// Motif database build time; zero when the database was supplied.
    pub prep_seconds: f64,
    pub decompose_seconds: f64,
    pub compute_seconds: f64,
    pub slices: usize,
    pub peak_rows: usize,
}

impl MatchReport {
    pub fn total_seconds(&self) -> f64 {
        self.prep_seconds + self.compute_seconds
    }
}

/// Counts matches against a prebuilt database, so `prep_seconds` is zero.
pub fn count_matches(pattern: &Graph, db: &MotifDatabase, mode: MatchMode) -> Result<MatchReport> {
    let r = delta_motif_detailed(pattern, db, mode)?;
    let count = r.table.len();
    db.recycle(r.table);
    Ok(MatchReport {
        count,
        prep_seconds: 0.0,
        decompose_seconds: r.decompose_seconds,
        compute_seconds: r.compute_seconds,
        slices: r.stats.slices,
        peak_rows: r.stats.peak_rows,
    })
}

/// Builds a database for `motifs` first and charges its build time to `prep_seconds`.
pub fn count_matches_uncached(
    pattern: &Graph,
    data: &Graph,
    motifs: &MotifSet,
    mode: MatchMode,
) -> Result<MatchReport> {
    let start = Instant::now();
    let db = build_database(data, motifs)?;
    let prep_seconds = start.elapsed().as_secs_f64();
    let mut report = count_matches(pattern, &db, mode)?;
    report.prep_seconds = prep_seconds;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::square_grid;
    use crate::table::sort_rows;
    use crate::vf2::vf2_enumerate;

    fn set(names: &[&str]) -> MotifSet {
        MotifSet::from_names(names).unwrap()
    }

    #[test]
    fn k3_databases() {
        let k3 = Graph::complete(3);
        let db = build_database(&k3, &set(&["M2"])).unwrap();
        assert_eq!(db.table("M2").unwrap().len(), 6);
        let db = build_database(&k3, &set(&["M3", "M2"])).unwrap();
        assert_eq!(db.table("M3").unwrap().len(), 6);
    }

    #[test]
    fn square_in_2x2_grid() {
        let db = build_database(&square_grid(2, 2), &set(&["M4-O", "M2"])).unwrap();
        assert_eq!(db.table("M4-O").unwrap().len(), 8);
    }

    #[test]
    fn single_edge_pattern_is_the_edge_table() {
        let g = square_grid(3, 4);
        let db = build_database(&g, &set(&["M4-O", "M2"])).unwrap();
        let r = delta_motif_detailed(&Graph::path(2), &db, MatchMode::Monomorphism).unwrap();
        assert_eq!(r.stats.joins, 0);
        assert_eq!(r.table.len(), 2 * g.edge_count());
    }

    #[test]
    fn known_counts() {
        let k4 = Graph::complete(4);
        let db = build_database(&k4, &set(&["M3", "M2"])).unwrap();
        assert_eq!(
            count_matches(&Graph::complete(3), &db, MatchMode::Monomorphism)
                .unwrap()
                .count,
            24
        );
        let c6 = Graph::cycle(6);
        let db = build_database(&c6, &set(&["M4", "M2"])).unwrap();
        assert_eq!(
            count_matches(&c6, &db, MatchMode::Monomorphism)
                .unwrap()
                .count,
            12
        );
        let grid = square_grid(5, 5);
        let db = build_database(&grid, &set(&["M4-O", "M2"])).unwrap();
        assert!(
            delta_motif(&Graph::complete(3), &db, MatchMode::Monomorphism)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn single_vertex_pattern() {
        let g = Graph::path(4);
        let db = build_database(&g, &set(&["M2"])).unwrap();
        assert_eq!(
            delta_motif(&Graph::empty(1), &db, MatchMode::Monomorphism)
                .unwrap()
                .len(),
            4
        );
    }

    #[test]
    fn disconnected_pattern_rejected() {
        let db = build_database(&Graph::complete(4), &set(&["M2"])).unwrap();
        let p = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            delta_motif(&p, &db, MatchMode::Monomorphism),
            Err(Error::DisconnectedPattern)
        ));
    }

    #[test]
    fn induced_mode_matches_vf2() {
        let data = crate::graph::erdos_renyi(10, 0.5, 3);
        let db = build_database(&data, &set(&["M3", "M2"])).unwrap();
        let pattern = Graph::cycle(4);
        let got = delta_motif(&pattern, &db, MatchMode::Induced).unwrap();
        let want = vf2_enumerate(&pattern, &data, MatchMode::Induced, None);
        assert_eq!(sort_rows(&got), sort_rows(&want));
    }

    #[test]
    fn cell_limit_scales_with_arity() {
        let config = EngineConfig {
            row_limit: 100,
            cell_limit: 120,
        };
        assert_eq!(
            (config.rows_for(1), config.rows_for(4), config.rows_for(0)),
            (100, 30, 100)
        );
        let data = square_grid(4, 4);
        let mut tight = build_database_with(&data, &set(&["M2"]), config).unwrap();
        // 160 cells hold 40 rows of 4 columns, fewer than the 4-paths of the grid
        tight.set_config(EngineConfig {
            row_limit: 1000,
            cell_limit: 4 * 40,
        });
        assert!(delta_motif(&Graph::path(4), &tight, MatchMode::Monomorphism).is_err());
        assert!(delta_motif(&Graph::path(2), &tight, MatchMode::Monomorphism).is_ok());
    }

    #[test]
    fn memory_budget_names_motif() {
        let config = EngineConfig {
            row_limit: 20,
            ..EngineConfig::default()
        };
        let err =
            build_database_with(&Graph::complete(5), &set(&["M3", "M2"]), config).unwrap_err();
        match err {
            Error::MemoryBudget { context, .. } => assert_eq!(context, "motif M3"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn uncached_report_has_prep_time() {
        let g = square_grid(6, 6);
        let r = count_matches_uncached(
            &Graph::cycle(4),
            &g,
            &set(&["M4-O", "M2"]),
            MatchMode::Monomorphism,
        )
        .unwrap();
        assert_eq!(r.count, 25 * 8);
        assert!(r.prep_seconds > 0.0);
        assert!(r.total_seconds() >= r.compute_seconds);
    }

    #[test]
    fn repeated_queries_reuse_scratch() {
        let g = square_grid(6, 6);
        let db = build_database(&g, &set(&["M4-O", "M2"])).unwrap();
        let p = Graph::path(5);
        let first = sort_rows(&delta_motif(&p, &db, MatchMode::Monomorphism).unwrap());
        // counting hands the finished result's buffer back
        assert_eq!(
            count_matches(&p, &db, MatchMode::Monomorphism)
                .unwrap()
                .count,
            first.len()
        );
        assert!(db.scratch.lock().unwrap().is_some());
        let again = sort_rows(&delta_motif(&p, &db, MatchMode::Monomorphism).unwrap());
        assert_eq!(first, again);
        db.release_scratch();
        assert!(db.scratch.lock().unwrap().is_none());
        assert_eq!(
            sort_rows(&delta_motif(&p, &db, MatchMode::Monomorphism).unwrap()),
            first
        );
    }

    #[test]
    fn pipelined_and_materialized_joins_agree_row_for_row() {
        // 20 x 20 makes first tables longer than one parallel chunk
        let g = square_grid(20, 20);
        let db = build_database(&g, &set(&["M4-O", "M3", "M2"])).unwrap();
        let noop = |_: &Slice, _: &mut EmbeddingTable| Ok(());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        for pattern in [
            Graph::path(6),
            Graph::cycle(6),
            square_grid(2, 3),
            Graph::cycle(4),
        ] {
            let decomposition = decompose(&pattern, db.motifs()).unwrap();
            let run = |correction: Option<ScoreCorrection<'_>>| {
                run_pipeline(
                    &pattern,
                    &decomposition,
                    &db.tables,
                    &db.indexes,
                    &g,
                    MatchMode::Monomorphism,
                    db.config,
                    correction,
                    None,
                )
                .unwrap()
                .table
            };
            let walked = run(None);
            assert_eq!(walked, run(Some(&noop)));
            assert_eq!(walked, pool.install(|| run(None)));
            assert_eq!(
                walked.len(),
                vf2_enumerate(&pattern, &g, MatchMode::Monomorphism, None).len()
            );
        }
    }
}
