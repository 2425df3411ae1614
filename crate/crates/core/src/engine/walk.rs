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

//! Pipelined execution of a left-deep join plan.
//!
//! Instead of materializing the table after every join, each row of the first
//! slice is pushed through all later joins depth first: the slot index of the
//! next motif is probed with the row built so far, collisions are rejected on
//! the spot, and only complete rows are written out. The probes, keys and
//! filter are exactly those of the materialized joins, and rows come out in
//! the same order (left row order, then motif row id, at every level). Only
//! the intermediate tables disappear.

use rayon::prelude::*;

use crate::decompose::Slice;
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::table::{EmbeddingTable, SlotIndex};

const CHUNK: usize = 1024;

/// One later slice, with keys and payload resolved to slots and pattern vertices.
pub(crate) struct Step<'a> {
    table: &'a EmbeddingTable,
    index: &'a SlotIndex,
    /// (pattern vertex, slot) probed through the slot or pair index
    lead: (usize, usize),
    second: Option<(usize, usize)>,
    checks: Vec<(usize, usize)>,
    /// (slot, pattern vertex) bound by this step
    payload: Vec<(usize, usize)>,
}

impl<'a> Step<'a> {
    /// `bound[v]` tells whether pattern vertex `v` is set by earlier slices;
    /// it is updated with this slice's vertices.
    pub(crate) fn new(
        slice: &Slice,
        table: &'a EmbeddingTable,
        index: &'a SlotIndex,
        bound: &mut [bool],
    ) -> Result<Self> {
        let slot_of = |v: VertexId| {
            slice
                .assignment
                .iter()
                .position(|&a| a == v)
                .ok_or_else(|| Error::Join(format!("motif has no slot named {v}")))
        };
        let mut keys = Vec::with_capacity(slice.constraints.len());
        for c in &slice.constraints {
            if !bound.get(c.left as usize).copied().unwrap_or(false) {
                return Err(Error::Join(format!("left table has no column {}", c.left)));
            }
            keys.push((c.left as usize, slot_of(c.right)?));
        }
        if keys.is_empty() {
            return Err(Error::Join(
                "at least one join constraint is required".into(),
            ));
        }
        let mut payload = Vec::new();
        for (slot, &v) in slice.assignment.iter().enumerate() {
            if keys.iter().any(|k| k.1 == slot) {
                continue;
            }
            if bound[v as usize] {
                return Err(Error::Join(format!(
                    "column {v} is shared but not constrained"
                )));
            }
            payload.push((slot, v as usize));
        }
        for &(_, v) in &payload {
            bound[v] = true;
        }
        let lead = keys.remove(0);
        let second = (!keys.is_empty()).then(|| keys.remove(0));
        Ok(Step {
            table,
            index,
            lead,
            second,
            checks: keys,
            payload,
        })
    }
}

#[derive(Default)]
pub(crate) struct WalkOut {
    pub data: Vec<VertexId>,
    pub rows: usize,
    /// Rows that met a join's keys but collided with a bound vertex.
    pub rejected: usize,
}

struct Walker<'s, 'a> {
    steps: &'s [Step<'a>],
    cur: Vec<VertexId>,
    used: Vec<bool>,
    out: WalkOut,
    limit: usize,
}

impl Walker<'_, '_> {
    /// False once more than `limit` rows have been written.
    fn descend(&mut self, depth: usize) -> bool {
        let steps = self.steps;
        let Some(step) = steps.get(depth) else {
            self.out.data.extend_from_slice(&self.cur);
            self.out.rows += 1;
            return self.out.rows <= self.limit;
        };
        let lead = self.cur[step.lead.0];
        let candidates = match step.second {
            Some((v, slot)) => step
                .index
                .rows_with_pair(step.lead.1, lead, slot, self.cur[v]),
            None => step.index.rows_with(step.lead.1, lead),
        };
        for &r in candidates {
            let row = step.table.row(r as usize);
            if !step.checks.iter().all(|&(v, s)| self.cur[v] == row[s]) {
                continue;
            }
            // motif rows are injective, so only payload-vs-bound collisions remain
            if step
                .payload
                .iter()
                .any(|&(s, _)| self.used[row[s] as usize])
            {
                self.out.rejected += 1;
                continue;
            }
            for &(s, v) in &step.payload {
                self.cur[v] = row[s];
                self.used[row[s] as usize] = true;
            }
            let more = self.descend(depth + 1);
            for &(s, _) in &step.payload {
                self.used[row[s] as usize] = false;
            }
            if !more {
                return false;
            }
        }
        true
    }

    fn run(
        &mut self,
        first: &EmbeddingTable,
        assignment: &[VertexId],
        rows: std::ops::Range<usize>,
    ) {
        for i in rows {
            let row = first.row(i);
            for (s, &v) in row.iter().enumerate() {
                self.cur[assignment[s] as usize] = v;
                self.used[v as usize] = true;
            }
            let more = self.descend(0);
            for &v in row {
                self.used[v as usize] = false;
            }
            if !more {
                return;
            }
        }
    }
}

/// Rows of the full plan, `n` columns in pattern-vertex order. `vertex_bound`
/// must exceed every data vertex id. `buffer` is reused for the output when
/// running on one thread. Stops early once more than `limit` rows exist.
pub(crate) fn walk(
    first: &EmbeddingTable,
    assignment: &[VertexId],
    steps: &[Step<'_>],
    n: usize,
    vertex_bound: usize,
    limit: usize,
    mut buffer: Vec<VertexId>,
) -> WalkOut {
    let walker = |data: Vec<VertexId>, limit: usize| Walker {
        steps,
        cur: vec![0; n],
        used: vec![false; vertex_bound],
        out: WalkOut {
            data,
            ..Default::default()
        },
        limit,
    };
    let len = first.len();
    if rayon::current_num_threads() == 1 || len <= CHUNK {
        buffer.clear();
        let mut w = walker(buffer, limit);
        w.run(first, assignment, 0..len);
        return w.out;
    }
    let parts: Vec<WalkOut> = (0..len)
        .into_par_iter()
        .step_by(CHUNK)
        .map(|start| {
            let mut w = walker(Vec::new(), limit);
            w.run(first, assignment, start..(start + CHUNK).min(len));
            w.out
        })
        .collect();
    let rows: usize = parts.iter().map(|p| p.rows).sum();
    buffer.clear();
    buffer.reserve(rows.min(limit.saturating_add(1)) * n);
    let mut out = WalkOut {
        data: buffer,
        ..Default::default()
    };
    for p in parts {
        out.data.extend_from_slice(&p.data);
        out.rows += p.rows;
        out.rejected += p.rejected;
    }
    out
}
