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

//! Columnar embedding tables.
//!
//! An [`EmbeddingTable`] holds one row per embedding and one column per
//! pattern or motif slot. Columns are named by the slot's vertex id. Rows are
//! stored row-major in a single flat buffer so a row is a contiguous slice;
//! an optional `score` column runs alongside.

mod index;
mod io;
mod join;

pub use index::{join_indexed, SlotIndex};
pub(crate) use index::{join_indexed_into, Buffers};
pub use io::{read_binary, read_csv, write_binary, write_csv, BINARY_MAGIC, BINARY_VERSION};
pub use join::{inner_join, join_and_filter, JoinStats};

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Column name: the vertex id of the pattern or motif slot the column holds.
pub type ColumnId = u32;

/// Equality between a left-table column and a right-table column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct JoinConstraint {
    pub left: ColumnId,
    pub right: ColumnId,
}

impl JoinConstraint {
    pub fn new(left: ColumnId, right: ColumnId) -> Self {
        JoinConstraint { left, right }
    }

    pub fn mirrored(self) -> Self {
        JoinConstraint {
            left: self.right,
            right: self.left,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    columns: Vec<ColumnId>,
    data: Vec<VertexId>,
    scores: Option<Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(columns: Vec<ColumnId>) -> Result<Self> {
        Self::from_flat(columns, Vec::new(), None)
    }

    pub fn from_flat(
        columns: Vec<ColumnId>,
        data: Vec<VertexId>,
        scores: Option<Vec<f64>>,
    ) -> Result<Self> {
        let mut seen = FxHashSet::default();
        if let Some(dup) = columns.iter().find(|c| !seen.insert(**c)) {
            return Err(Error::Table(format!("duplicate column {dup}")));
        }
        if columns.is_empty() && !data.is_empty() {
            return Err(Error::Table("zero-column table cannot hold data".into()));
        }
        if !columns.is_empty() && data.len() % columns.len() != 0 {
            return Err(Error::Table(format!(
                "{} values do not fill rows of arity {}",
                data.len(),
                columns.len()
            )));
        }
        let table = EmbeddingTable {
            columns,
            data,
            scores: None,
        };
        match scores {
            Some(s) => table.with_scores(s),
            None => Ok(table),
        }
    }

    pub fn from_rows<R: AsRef<[VertexId]>>(columns: Vec<ColumnId>, rows: &[R]) -> Result<Self> {
        let arity = columns.len();
        let mut data = Vec::with_capacity(rows.len() * arity);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != arity {
                return Err(Error::Table(format!(
                    "row {i} has {} values, expected {arity}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(columns, data, None)
    }

    /// Attaches a score column, one value per row.
    pub fn with_scores(mut self, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != self.len() {
            return Err(Error::Table(format!(
                "{} scores for {} rows",
                scores.len(),
                self.len()
            )));
        }
        self.scores = Some(scores);
        Ok(self)
    }

    pub fn without_scores(mut self) -> Self {
        self.scores = None;
        self
    }

    /// Gives back the row buffer for reuse.
    pub(crate) fn into_buffers(self) -> (Vec<VertexId>, Option<Vec<f64>>) {
        (self.data, self.scores)
    }

    #[inline]
    pub fn columns(&self) -> &[ColumnId] {
        &self.columns
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        if self.columns.is_empty() {
            0
        } else {
            self.data.len() / self.columns.len()
        }
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[VertexId] {
        let a = self.arity();
        &self.data[i * a..(i + 1) * a]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[VertexId]> + '_ {
        // chunks_exact panics on zero; a zero-arity table has no rows anyway
        self.data.chunks_exact(self.arity().max(1))
    }

    pub fn data(&self) -> &[VertexId] {
        &self.data
    }

    pub fn scores(&self) -> Option<&[f64]> {
        self.scores.as_deref()
    }

    pub(crate) fn scores_mut(&mut self) -> Option<&mut Vec<f64>> {
        self.scores.as_mut()
    }

    pub fn column_index(&self, column: ColumnId) -> Option<usize> {
        self.columns.iter().position(|&c| c == column)
    }

    /// Values of one column, top to bottom.
    pub fn column_values(&self, column: ColumnId) -> Option<Vec<VertexId>> {
        let idx = self.column_index(column)?;
        Some(self.rows().map(|r| r[idx]).collect())
    }

    /// Renames every column through `rename(old) -> new`.
    pub fn rename_columns(mut self, rename: impl Fn(ColumnId) -> ColumnId) -> Result<Self> {
        let columns: Vec<_> = self.columns.iter().map(|&c| rename(c)).collect();
        let data = std::mem::take(&mut self.data);
        Self::from_flat(columns, data, self.scores.take())
    }

    /// Reorders columns to `order`, which must be a permutation of the current columns.
    pub fn project(&self, order: &[ColumnId]) -> Result<Self> {
        self.clone().into_projection(order)
    }

    /// [`project`](Self::project) without copying the table.
    pub fn into_projection(mut self, order: &[ColumnId]) -> Result<Self> {
        if order.len() != self.arity() {
            return Err(Error::Table("projection must keep every column".into()));
        }
        let idx = order
            .iter()
            .map(|&c| {
                self.column_index(c)
                    .ok_or_else(|| Error::Table(format!("unknown column {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if idx.iter().enumerate().all(|(i, &j)| i == j) {
            return Ok(self);
        }
        let mut scratch = vec![0; idx.len()];
        for row in self.data.chunks_exact_mut(idx.len()) {
            scratch.copy_from_slice(row);
            for (dst, &j) in row.iter_mut().zip(&idx) {
                *dst = scratch[j];
            }
        }
        self.columns = order.to_vec();
        Ok(self)
    }

    /// Same table with columns in ascending id order.
    pub fn with_sorted_columns(&self) -> Self {
        let mut order = self.columns.clone();
        order.sort_unstable();
        self.project(&order)
            .expect("sorted columns are a permutation")
    }

    /// True when every row holds pairwise distinct vertex ids.
    pub fn is_injective(&self) -> bool {
        let mut scratch = Vec::with_capacity(self.arity());
        self.rows().all(|row| all_distinct(row, &mut scratch))
    }

    fn gather(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(keep.len() * self.arity());
        for &i in keep {
            data.extend_from_slice(self.row(i));
        }
        EmbeddingTable {
            columns: self.columns.clone(),
            data,
            scores: self
                .scores
                .as_ref()
                .map(|s| keep.iter().map(|&i| s[i]).collect()),
        }
    }
}

pub(crate) fn all_distinct(row: &[VertexId], scratch: &mut Vec<VertexId>) -> bool {
    if row.len() <= 8 {
        return (1..row.len()).all(|i| !row[..i].contains(&row[i]));
    }
    scratch.clear();
    scratch.extend_from_slice(row);
    scratch.sort_unstable();
    scratch.windows(2).all(|w| w[0] != w[1])
}

/// Keeps rows whose values are pairwise distinct.
///
/// Join output stores every constrained vertex once, so a valid row has as
/// many distinct values as columns; any extra coincidence means two pattern
/// vertices landed on the same data vertex.
pub fn filter_overlaps(t: &EmbeddingTable) -> EmbeddingTable {
    let mut scratch = Vec::new();
    let keep: Vec<usize> = (0..t.len())
        .filter(|&i| all_distinct(t.row(i), &mut scratch))
        .collect();
    if keep.len() == t.len() {
        return t.clone();
    }
    t.gather(&keep)
}

/// Collapses rows that describe the same subgraph.
///
/// With `automorphisms`, each entry is a permutation of column positions
/// (`row'[i] = row[perm[i]]`); rows in the same orbit collapse to the first
/// one encountered. Without it, rows collapse when they cover the same vertex
/// set. Pipelines enumerate mappings and never call this implicitly.
pub fn dedup_canonical(
    t: &EmbeddingTable,
    automorphisms: Option<&[Vec<usize>]>,
) -> Result<EmbeddingTable> {
    if let Some(group) = automorphisms {
        if let Some(bad) = group.iter().find(|p| !is_permutation(p, t.arity())) {
            return Err(Error::InvalidArgument(format!(
                "automorphism {bad:?} is not a permutation of {} columns",
                t.arity()
            )));
        }
    }
    let mut seen: FxHashSet<Vec<VertexId>> = FxHashSet::default();
    let mut keep = Vec::new();
    for (i, row) in t.rows().enumerate() {
        let key = match automorphisms {
            Some(group) => group
                .iter()
                .map(|perm| perm.iter().map(|&j| row[j]).collect::<Vec<_>>())
                .min()
                .unwrap_or_else(|| row.to_vec()),
            None => {
                let mut k = row.to_vec();
                k.sort_unstable();
                k
            }
        };
        if seen.insert(key) {
            keep.push(i);
        }
    }
    Ok(t.gather(&keep))
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut hit = vec![false; n];
    p.len() == n
        && p.iter()
            .all(|&j| j < n && !std::mem::replace(&mut hit[j], true))
}

/// Columns in ascending id order, rows in lexicographic order. Stable, so rows
/// that compare equal keep their relative order.
pub fn sort_rows(t: &EmbeddingTable) -> EmbeddingTable {
    use rayon::prelude::*;

    let t = t.with_sorted_columns();
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.par_sort_by(|&a, &b| t.row(a).cmp(t.row(b)));
    t.gather(&order)
}
