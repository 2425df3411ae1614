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

//! Equality hash join over embedding tables.
//!
//! The smaller input is the build side. Its rows are hashed on the composite
//! key of constrained columns into a chained table (`heads` maps a key hash to
//! the first row, `next` links rows sharing a hash). The probe side is split
//! into fixed-size chunks that are probed in parallel and concatenated in
//! chunk order, so output is deterministic for a given pair of inputs.

use std::hash::Hasher;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHasher};

use super::{ColumnId, EmbeddingTable, JoinConstraint};
use crate::error::{Error, Result};
use crate::graph::VertexId;

const PROBE_CHUNK: usize = 4096;
const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JoinStats {
    /// Rows satisfying the join keys, before the overlap filter.
    pub raw_rows: usize,
    /// Rows surviving the overlap filter.
    pub kept_rows: usize,
}

struct JoinPlan {
    left_keys: Vec<usize>,
    right_keys: Vec<usize>,
    /// Right-side column positions carried into the output.
    right_payload: Vec<usize>,
    columns: Vec<ColumnId>,
}

impl JoinPlan {
    fn new(
        left: &EmbeddingTable,
        right: &EmbeddingTable,
        constraints: &[JoinConstraint],
    ) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::Join(
                "at least one join constraint is required".into(),
            ));
        }
        let mut left_keys = Vec::with_capacity(constraints.len());
        let mut right_keys = Vec::with_capacity(constraints.len());
        for c in constraints {
            left_keys.push(
                left.column_index(c.left)
                    .ok_or_else(|| Error::Join(format!("left table has no column {}", c.left)))?,
            );
            right_keys.push(
                right
                    .column_index(c.right)
                    .ok_or_else(|| Error::Join(format!("right table has no column {}", c.right)))?,
            );
        }
        let right_payload: Vec<usize> = (0..right.arity())
            .filter(|i| !right_keys.contains(i))
            .collect();

        // right columns that clash with a left name get fresh ids past every existing one
        let mut fresh = left
            .columns()
            .iter()
            .chain(right.columns())
            .max()
            .map_or(0, |m| m + 1);
        let mut columns = left.columns().to_vec();
        for &i in &right_payload {
            let name = right.columns()[i];
            if columns.contains(&name) {
                columns.push(fresh);
                fresh += 1;
            } else {
                columns.push(name);
            }
        }
        Ok(JoinPlan {
            left_keys,
            right_keys,
            right_payload,
            columns,
        })
    }
}

#[inline]
fn key_hash(row: &[VertexId], keys: &[usize]) -> u64 {
    let mut h = FxHasher::default();
    for &k in keys {
        h.write_u32(row[k]);
    }
    h.finish()
}

#[inline]
fn keys_equal(a: &[VertexId], a_keys: &[usize], b: &[VertexId], b_keys: &[usize]) -> bool {
    a_keys.iter().zip(b_keys).all(|(&i, &j)| a[i] == b[j])
}

struct BuildSide<'a> {
    table: &'a EmbeddingTable,
    keys: &'a [usize],
    heads: FxHashMap<u64, u32>,
    next: Vec<u32>,
}

impl<'a> BuildSide<'a> {
    fn new(table: &'a EmbeddingTable, keys: &'a [usize]) -> Self {
        let mut heads = FxHashMap::with_capacity_and_hasher(table.len(), Default::default());
        let mut next = vec![NIL; table.len()];
        // reverse insertion leaves each chain in ascending row order
        for i in (0..table.len()).rev() {
            let h = key_hash(table.row(i), keys);
            if let Some(prev) = heads.insert(h, i as u32) {
                next[i] = prev;
            }
        }
        BuildSide {
            table,
            keys,
            heads,
            next,
        }
    }

    #[inline]
    fn for_each_match(&self, probe: &[VertexId], probe_keys: &[usize], mut f: impl FnMut(usize)) {
        let Some(&head) = self.heads.get(&key_hash(probe, probe_keys)) else {
            return;
        };
        let mut i = head;
        while i != NIL {
            let row = self.table.row(i as usize);
            if keys_equal(row, self.keys, probe, probe_keys) {
                f(i as usize);
            }
            i = self.next[i as usize];
        }
    }
}

#[derive(Default)]
struct ChunkOut {
    data: Vec<VertexId>,
    scores: Vec<f64>,
    raw: usize,
    kept: usize,
}

fn execute(
    left: &EmbeddingTable,
    right: &EmbeddingTable,
    plan: &JoinPlan,
    filter: bool,
    row_limit: usize,
) -> Result<(EmbeddingTable, JoinStats)> {
    let build_left = left.len() < right.len();
    let (build_table, build_keys, probe_table, probe_keys) = if build_left {
        (left, &plan.left_keys[..], right, &plan.right_keys[..])
    } else {
        (right, &plan.right_keys[..], left, &plan.left_keys[..])
    };
    let build = BuildSide::new(build_table, build_keys);

    let score_of = |l: usize, r: usize| -> Option<f64> {
        match (left.scores(), right.scores()) {
            (Some(a), Some(b)) => Some(a[l] * b[r]),
            (Some(a), None) => Some(a[l]),
            (None, Some(b)) => Some(b[r]),
            (None, None) => None,
        }
    };
    let scored = left.scores().is_some() || right.scores().is_some();

    // probes rows [start, end) into `out`; stops early once `limit` rows are kept
    let probe_range = |start: usize, end: usize, out: &mut ChunkOut, limit: usize| {
        for p in start..end {
            let probe_row = probe_table.row(p);
            build.for_each_match(probe_row, probe_keys, |b| {
                out.raw += 1;
                let (l, r) = if build_left { (b, p) } else { (p, b) };
                let lrow = left.row(l);
                let rrow = right.row(r);
                // inputs are injective, so only payload-vs-left collisions remain
                if filter && plan.right_payload.iter().any(|&j| lrow.contains(&rrow[j])) {
                    return;
                }
                out.data.extend_from_slice(lrow);
                out.data.extend(plan.right_payload.iter().map(|&j| rrow[j]));
                if let Some(s) = score_of(l, r) {
                    out.scores.push(s);
                }
                out.kept += 1;
            });
            if out.kept > limit {
                return;
            }
        }
    };

    let n = probe_table.len();
    let out = if rayon::current_num_threads() == 1 || n <= PROBE_CHUNK {
        let mut out = ChunkOut::default();
        probe_range(0, n, &mut out, row_limit);
        out
    } else {
        let kept_total = AtomicUsize::new(0);
        let chunks: Vec<ChunkOut> = (0..n)
            .into_par_iter()
            .step_by(PROBE_CHUNK)
            .map(|start| {
                let mut out = ChunkOut::default();
                let seen = kept_total.load(Ordering::Relaxed);
                if seen <= row_limit {
                    probe_range(
                        start,
                        (start + PROBE_CHUNK).min(n),
                        &mut out,
                        row_limit - seen,
                    );
                    kept_total.fetch_add(out.kept, Ordering::Relaxed);
                }
                out
            })
            .collect();
        let kept: usize = chunks.iter().map(|c| c.kept).sum();
        let mut out = ChunkOut {
            data: Vec::with_capacity(kept.min(row_limit + 1) * plan.columns.len()),
            scores: Vec::with_capacity(if scored { kept.min(row_limit + 1) } else { 0 }),
            raw: 0,
            kept: 0,
        };
        for c in chunks {
            out.data.extend_from_slice(&c.data);
            out.scores.extend_from_slice(&c.scores);
            out.raw += c.raw;
            out.kept += c.kept;
        }
        out
    };

    if out.kept > row_limit {
        return Err(Error::MemoryBudget {
            context: "join".into(),
            rows: out.kept,
            limit: row_limit,
        });
    }
    let (data, scores, raw, kept) = (out.data, out.scores, out.raw, out.kept);
    let table = EmbeddingTable::from_flat(plan.columns.clone(), data, scored.then_some(scores))?;
    Ok((
        table,
        JoinStats {
            raw_rows: raw,
            kept_rows: kept,
        },
    ))
}

/// Inner equality join without any overlap filtering.
///
/// Output columns are the left columns followed by every right column that is
/// not a join key. Each constrained pair is therefore stored once, under the
/// left name. A carried right column whose name already exists on the left is
/// renamed to a fresh id above every existing column id. When both sides carry
/// scores the output score is their product; when one side does, it is copied.
pub fn inner_join(
    left: &EmbeddingTable,
    right: &EmbeddingTable,
    constraints: &[JoinConstraint],
) -> Result<EmbeddingTable> {
    let plan = JoinPlan::new(left, right, constraints)?;
    execute(left, right, &plan, false, usize::MAX).map(|(t, _)| t)
}

/// Join fused with the overlap filter: equivalent to
/// `filter_overlaps(inner_join(..))` when both inputs are injective, without
/// materializing rejected rows. Fails once more than `row_limit` rows survive.
pub fn join_and_filter(
    left: &EmbeddingTable,
    right: &EmbeddingTable,
    constraints: &[JoinConstraint],
    row_limit: usize,
) -> Result<(EmbeddingTable, JoinStats)> {
    let plan = JoinPlan::new(left, right, constraints)?;
    execute(left, right, &plan, true, row_limit)
}
