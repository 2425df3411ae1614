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

//! Per-slot vertex indexes over motif tables, and the join that probes them.
//!
//! A motif table is joined many times across queries, always against the same
//! rows. Indexing it once per slot (rows grouped by the vertex in that slot)
//! replaces the per-join hash build with a direct offset lookup. The
//! accumulated table is always the probe side.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::join::JoinStats;
use super::{ColumnId, EmbeddingTable, JoinConstraint};
use crate::error::{Error, Result};
use crate::graph::VertexId;

const PROBE_CHUNK: usize = 4096;

/// For each slot, the table's row ids grouped by the vertex in that slot,
/// and for each slot pair `a < b`, grouped by the vertex pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlotIndex {
    vertex_bound: usize,
    offsets: Vec<Vec<u32>>,
    rows: Vec<Vec<u32>>,
    /// Indexed by `a * arity + b`; empty for `a >= b`.
    pairs: Vec<PairIndex>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct PairIndex {
    ranges: FxHashMap<u64, (u32, u32)>,
    rows: Vec<u32>,
}

#[inline]
fn pair_key(u: VertexId, v: VertexId) -> u64 {
    (u as u64) << 32 | v as u64
}

impl PairIndex {
    fn new(table: &EmbeddingTable, a: usize, b: usize) -> Self {
        let mut rows: Vec<u32> = (0..table.len() as u32).collect();
        let key = |i: u32| {
            let row = table.row(i as usize);
            pair_key(row[a], row[b])
        };
        rows.sort_by_key(|&i| key(i));
        let mut ranges = FxHashMap::default();
        let mut start = 0;
        while start < rows.len() {
            let k = key(rows[start]);
            let mut end = start + 1;
            while end < rows.len() && key(rows[end]) == k {
                end += 1;
            }
            ranges.insert(k, (start as u32, end as u32));
            start = end;
        }
        PairIndex { ranges, rows }
    }

    #[inline]
    fn get(&self, u: VertexId, v: VertexId) -> &[u32] {
        match self.ranges.get(&pair_key(u, v)) {
            Some(&(s, e)) => &self.rows[s as usize..e as usize],
            None => &[],
        }
    }
}

impl SlotIndex {
    /// `vertex_bound` must exceed every vertex id in `table`.
    pub fn new(table: &EmbeddingTable, vertex_bound: usize) -> Result<Self> {
        if table.data().iter().any(|&v| v as usize >= vertex_bound) {
            return Err(Error::Table(format!(
                "vertex id outside bound {vertex_bound}"
            )));
        }
        let k = table.arity();
        let mut offsets = Vec::with_capacity(k);
        let mut rows = Vec::with_capacity(k);
        for slot in 0..k {
            let mut off = vec![0u32; vertex_bound + 1];
            for row in table.rows() {
                off[row[slot] as usize + 1] += 1;
            }
            for v in 0..vertex_bound {
                off[v + 1] += off[v];
            }
            let mut cursor = off.clone();
            let mut ids = vec![0u32; table.len()];
            for (i, row) in table.rows().enumerate() {
                let c = &mut cursor[row[slot] as usize];
                ids[*c as usize] = i as u32;
                *c += 1;
            }
            offsets.push(off);
            rows.push(ids);
        }
        let mut pairs = vec![PairIndex::default(); k * k];
        for a in 0..k {
            for b in a + 1..k {
                pairs[a * k + b] = PairIndex::new(table, a, b);
            }
        }
        Ok(SlotIndex {
            vertex_bound,
            offsets,
            rows,
            pairs,
        })
    }

    pub fn vertex_bound(&self) -> usize {
        self.vertex_bound
    }

    /// Ids of rows holding `u` in slot `a` and `v` in slot `b`, ascending.
    #[inline]
    pub fn rows_with_pair(&self, a: usize, u: VertexId, b: usize, v: VertexId) -> &[u32] {
        let k = self.offsets.len();
        if a < b {
            self.pairs[a * k + b].get(u, v)
        } else {
            self.pairs[b * k + a].get(v, u)
        }
    }

    /// Ids of rows holding `v` in `slot`, ascending.
    #[inline]
    pub fn rows_with(&self, slot: usize, v: VertexId) -> &[u32] {
        let off = &self.offsets[slot];
        match off.get(v as usize..v as usize + 2) {
            Some(w) => &self.rows[slot][w[0] as usize..w[1] as usize],
            None => &[],
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

/// Joins `left` with a motif table whose slot `s` is named `slot_names[s]`,
/// dropping rows where a new vertex collides with one already in the left row.
///
/// Every constraint's `right` must name a slot. Non-key slots are appended in
/// slot order and must not clash with a left column name. Output rows follow
/// left row order, then ascending motif row id.
pub fn join_indexed(
    left: &EmbeddingTable,
    motif: &EmbeddingTable,
    index: &SlotIndex,
    slot_names: &[ColumnId],
    constraints: &[JoinConstraint],
    row_limit: usize,
) -> Result<(EmbeddingTable, JoinStats)> {
    join_indexed_into(
        left,
        motif,
        index,
        slot_names,
        constraints,
        row_limit,
        None,
        Buffers::default(),
    )
}

/// Spare allocations a join may write into instead of allocating afresh.
#[derive(Debug, Default)]
pub(crate) struct Buffers {
    pub data: Vec<VertexId>,
    pub scores: Vec<f64>,
}

pub(crate) fn join_indexed_into(
    left: &EmbeddingTable,
    motif: &EmbeddingTable,
    index: &SlotIndex,
    slot_names: &[ColumnId],
    constraints: &[JoinConstraint],
    row_limit: usize,
    order: Option<&[ColumnId]>,
    mut spare: Buffers,
) -> Result<(EmbeddingTable, JoinStats)> {
    if slot_names.len() != motif.arity() {
        return Err(Error::Join(format!(
            "{} slot names for a table of arity {}",
            slot_names.len(),
            motif.arity()
        )));
    }
    if index.offsets.len() != motif.arity() {
        return Err(Error::Join("index does not match table".into()));
    }
    let Some((first, rest)) = constraints.split_first() else {
        return Err(Error::Join(
            "at least one join constraint is required".into(),
        ));
    };
    let position = |c: &JoinConstraint| -> Result<(usize, usize)> {
        let l = left
            .column_index(c.left)
            .ok_or_else(|| Error::Join(format!("left table has no column {}", c.left)))?;
        let r = slot_names
            .iter()
            .position(|&n| n == c.right)
            .ok_or_else(|| Error::Join(format!("motif has no slot named {}", c.right)))?;
        Ok((l, r))
    };
    let (lead_left, lead_slot) = position(first)?;
    let mut checks = rest.iter().map(position).collect::<Result<Vec<_>>>()?;
    let key_slots: Vec<usize> = std::iter::once(lead_slot)
        .chain(checks.iter().map(|c| c.1))
        .collect();
    // with two or more keys the pair index already enforces the second one
    let second = (!checks.is_empty()).then(|| checks.remove(0));
    let payload: Vec<usize> = (0..motif.arity())
        .filter(|s| !key_slots.contains(s))
        .collect();
    let mut columns = left.columns().to_vec();
    for &s in &payload {
        if columns.contains(&slot_names[s]) {
            return Err(Error::Join(format!(
                "column {} is shared but not constrained",
                slot_names[s]
            )));
        }
        columns.push(slot_names[s]);
    }
    // output position -> left position, or left arity + motif slot
    let gather: Option<Vec<usize>> = match order {
        None => None,
        Some(order) => {
            if order.len() != columns.len() {
                return Err(Error::Join("output order must name every column".into()));
            }
            let la = left.arity();
            let gather = order
                .iter()
                .map(|c| match columns.iter().position(|x| x == c) {
                    Some(i) if i < la => Ok(i),
                    Some(i) => Ok(la + payload[i - la]),
                    None => Err(Error::Join(format!("unknown output column {c}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            columns = order.to_vec();
            Some(gather)
        }
    };
    let arity = columns.len();
    let bound = index.vertex_bound;
    let scored = left.scores().is_some() || motif.scores().is_some();

    let probe_range = |start: usize, end: usize, out: &mut ChunkOut, limit: usize| {
        // stamp[v] == tag marks v as used by the current left row
        let mut stamp = vec![0u32; bound];
        for l in start..end {
            let lrow = left.row(l);
            let tag = (l - start + 1) as u32;
            let mut stamped = false;
            let candidates = match second {
                Some((sl, ss)) => index.rows_with_pair(lead_slot, lrow[lead_left], ss, lrow[sl]),
                None => index.rows_with(lead_slot, lrow[lead_left]),
            };
            for &r in candidates {
                let rrow = motif.row(r as usize);
                if !checks.iter().all(|&(lp, rs)| lrow[lp] == rrow[rs]) {
                    continue;
                }
                out.raw += 1;
                if !stamped {
                    for &v in lrow {
                        // a vertex past the bound can never equal a motif vertex
                        if let Some(x) = stamp.get_mut(v as usize) {
                            *x = tag;
                        }
                    }
                    stamped = true;
                }
                // motif rows are injective, so only payload-vs-left collisions remain
                if payload.iter().any(|&s| stamp[rrow[s] as usize] == tag) {
                    continue;
                }
                match &gather {
                    None => {
                        out.data.extend_from_slice(lrow);
                        out.data.extend(payload.iter().map(|&s| rrow[s]));
                    }
                    Some(g) => {
                        let la = lrow.len();
                        out.data.extend(
                            g.iter()
                                .map(|&i| if i < la { lrow[i] } else { rrow[i - la] }),
                        );
                    }
                }
                match (left.scores(), motif.scores()) {
                    (Some(a), Some(b)) => out.scores.push(a[l] * b[r as usize]),
                    (Some(a), None) => out.scores.push(a[l]),
                    (None, Some(b)) => out.scores.push(b[r as usize]),
                    (None, None) => {}
                }
                out.kept += 1;
            }
            if out.kept > limit {
                return;
            }
        }
    };

    let n = left.len();
    let out = if rayon::current_num_threads() == 1 || n <= PROBE_CHUNK {
        spare.data.clear();
        spare.scores.clear();
        let mut out = ChunkOut {
            data: spare.data,
            scores: spare.scores,
            ..Default::default()
        };
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
            data: Vec::with_capacity(kept.min(row_limit + 1) * arity),
            scores: Vec::with_capacity(if scored { kept.min(row_limit + 1) } else { 0 }),
            ..Default::default()
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
    let table = EmbeddingTable::from_flat(columns, out.data, scored.then_some(out.scores))?;
    Ok((
        table,
        JoinStats {
            raw_rows: out.raw,
            kept_rows: out.kept,
        },
    ))
}
