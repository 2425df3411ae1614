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

//! Table serialization.
//!
//! CSV: an optional `#` comment line, a header of column ids with an optional
//! trailing `score` column, then one line per row. Scores are written with
//! Rust's shortest round-trip float formatting, so a write/read cycle is exact.
//!
//! Binary, all integers little-endian:
//!
//! ```text
//! offset  size        field
//! 0       4           magic "DMTB"
//! 4       4           version (u32) = 1
//! 8       4           column count C (u32)
//! 12      8           row count R (u64)
//! 20      4           flags (u32), bit 0 = score block present
//! 24      4*C         column ids (u32)
//! ..      4*R*C       vertex ids, row-major (u32)
//! ..      8*R         scores (f64), only when flagged
//! ```

use std::io::{Read, Write};
use std::path::Path;

use super::{ColumnId, EmbeddingTable};
use crate::error::{Error, Result};
use crate::graph::VertexId;

pub const BINARY_MAGIC: &[u8; 4] = b"DMTB";
pub const BINARY_VERSION: u32 = 1;
const HEADER_LEN: usize = 24;
const FLAG_SCORES: u32 = 1;

pub(crate) const CSV_HEADER_COMMENT: &str = "# delta-motif table v1";

pub fn write_csv(t: &EmbeddingTable, mut out: impl Write) -> Result<()> {
    let mut line = String::new();
    writeln!(out, "{CSV_HEADER_COMMENT}")?;
    let mut header: Vec<String> = t.columns().iter().map(|c| c.to_string()).collect();
    if t.scores().is_some() {
        header.push("score".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, row) in t.rows().enumerate() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        if let Some(s) = t.scores() {
            line.push(',');
            line.push_str(&format!("{:?}", s[i]));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read, origin: &Path) -> Result<EmbeddingTable> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(input);
    let bad = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let headers = reader.headers()?.clone();
    let mut names: Vec<&str> = headers.iter().map(str::trim).collect();
    let scored = names.last() == Some(&"score");
    if scored {
        names.pop();
    }
    let columns = names
        .iter()
        .map(|n| {
            n.parse::<ColumnId>()
                .map_err(|_| bad(1, format!("column name `{n}` is not a vertex id")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut data = Vec::new();
    let mut scores = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let expected = columns.len() + usize::from(scored);
        if record.len() != expected {
            return Err(bad(
                line,
                format!("expected {expected} fields, found {}", record.len()),
            ));
        }
        for field in record.iter().take(columns.len()) {
            data.push(
                field
                    .trim()
                    .parse::<VertexId>()
                    .map_err(|_| bad(line, format!("invalid vertex id `{field}`")))?,
            );
        }
        if scored {
            let field = record[columns.len()].trim();
            scores.push(
                field
                    .parse::<f64>()
                    .map_err(|_| bad(line, format!("invalid score `{field}`")))?,
            );
        }
    }
    EmbeddingTable::from_flat(columns, data, scored.then_some(scores))
}

pub fn write_binary(t: &EmbeddingTable, mut out: impl Write) -> Result<()> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 4 * (t.arity() + t.data().len()) + 8 * t.len());
    buf.extend_from_slice(BINARY_MAGIC);
    buf.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    buf.extend_from_slice(&(t.arity() as u32).to_le_bytes());
    buf.extend_from_slice(&(t.len() as u64).to_le_bytes());
    let flags = if t.scores().is_some() { FLAG_SCORES } else { 0 };
    buf.extend_from_slice(&flags.to_le_bytes());
    for c in t.columns() {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    for v in t.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(scores) = t.scores() {
        for s in scores {
            buf.extend_from_slice(&s.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn read_binary(mut input: impl Read, origin: &Path) -> Result<EmbeddingTable> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let corrupt = |reason: &str| Error::corrupt(origin, reason);
    if bytes.len() < HEADER_LEN {
        return Err(corrupt("truncated header"));
    }
    if &bytes[..4] != BINARY_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != BINARY_VERSION {
        return Err(corrupt(&format!("unsupported version {version}")));
    }
    let arity = u32_at(8) as usize;
    let rows = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let flags = u32_at(20);
    if flags & !FLAG_SCORES != 0 {
        return Err(corrupt("unknown flags"));
    }
    let rows = usize::try_from(rows).map_err(|_| corrupt("row count overflows"))?;
    let values = rows
        .checked_mul(arity)
        .ok_or_else(|| corrupt("row count overflows"))?;
    let score_bytes = if flags & FLAG_SCORES != 0 {
        8 * rows
    } else {
        0
    };
    let expected = 4usize
        .checked_mul(arity + values)
        .and_then(|n| n.checked_add(HEADER_LEN + score_bytes))
        .ok_or_else(|| corrupt("size overflows"))?;
    if bytes.len() != expected {
        return Err(corrupt(&format!(
            "expected {expected} bytes, found {}",
            bytes.len()
        )));
    }

    let mut offset = HEADER_LEN;
    let mut take_u32s = |n: usize| -> Vec<u32> {
        let out = bytes[offset..offset + 4 * n]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        offset += 4 * n;
        out
    };
    let columns = take_u32s(arity);
    let data = take_u32s(values);
    let scores = (flags & FLAG_SCORES != 0).then(|| {
        bytes[offset..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect()
    });
    EmbeddingTable::from_flat(columns, data, scores).map_err(|e| corrupt(&e.to_string()))
}
