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

//! Motif vocabulary.
//!
//! Names follow one convention: `Mk` is a simple path on `k` vertices, `Mk-O`
//! is a cycle on `k` vertices, and further suffixes mark branched variants.
//! Template slots are numbered as drawn below.
//!
//! ```text
//! Mk       0 - 1 - ... - (k-1)
//! Mk-O     0 - 1 - ... - (k-1) - 0
//! M4-1     0 - 1 - 2, with 3 hanging off 1 (a claw)
//! M6-2O    0 - 1 - 2        two squares sharing the edge 1-4
//!          |   |   |
//!          3 - 4 - 5
//! M18-O-6  the 12-cycle 0..11 of one heavy hexagon, plus pendant
//!          vertices 12..17 attached to 0, 2, 4, 6, 8, 10
//! ```
//!
//! The branched templates mirror lattice features: `M4-1` is the degree-3
//! junction of a heavy-hex lattice, `M6-2O` the 2 x 3 grid block, and
//! `M18-O-6` a heavy hexagon with its six outgoing couplers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const CATALOG: &[&str] = &[
    "M2", "M3", "M4", "M5", "M6", "M7", "M8", "M9", "M3-O", "M4-O", "M6-O", "M12-O", "M4-1",
    "M6-2O", "M18-O-6",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    name: String,
    template: Graph,
}

impl Motif {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn template(&self) -> &Graph {
        &self.template
    }

    pub fn size(&self) -> usize {
        self.template.vertex_count()
    }

    pub fn is_single_edge(&self) -> bool {
        self.template.vertex_count() == 2 && self.template.edge_count() == 1
    }
}

pub fn builtin_motif(name: &str) -> Result<Motif> {
    let template = match name {
        "M4-1" => Graph::new(4, [(0, 1), (1, 2), (1, 3)])?,
        "M6-2O" => Graph::new(6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)])?,
        "M18-O-6" => {
            let mut edges: Vec<(usize, usize)> = (0..12).map(|i| (i, (i + 1) % 12)).collect();
            edges.extend((0..6).map(|k| (2 * k, 12 + k)));
            Graph::new(18, edges)?
        }
        _ => match parse_simple_name(name) {
            Some((k, false)) if (2..=9).contains(&k) => Graph::path(k),
            Some((k, true)) if [3, 4, 6, 12].contains(&k) => Graph::cycle(k),
            _ => {
                return Err(Error::UnknownMotif {
                    name: name.to_string(),
                    catalog: CATALOG.join(", "),
                })
            }
        },
    };
    Ok(Motif {
        name: name.to_string(),
        template,
    })
}

/// `Mk` -> `(k, false)`, `Mk-O` -> `(k, true)`.
fn parse_simple_name(name: &str) -> Option<(usize, bool)> {
    let rest = name.strip_prefix('M')?;
    let (digits, cyclic) = match rest.strip_suffix("-O") {
        Some(d) => (d, true),
        None => (rest, false),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((digits.parse().ok()?, cyclic))
}

/// Registers a user-defined template under `name`.
pub fn custom_motif(name: &str, template: Graph) -> Result<Motif> {
    let invalid = |reason: &str| Error::InvalidMotif {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    if name.is_empty() {
        return Err(invalid("name must not be empty"));
    }
    if template.vertex_count() < 2 {
        return Err(invalid("template needs at least two vertices"));
    }
    if !template.is_connected() {
        return Err(invalid("template is not connected"));
    }
    Ok(Motif {
        name: name.to_string(),
        template,
    })
}

/// Motifs ordered by descending template size, ties by name. Always holds `M2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifSet {
    motifs: Vec<Motif>,
}

impl MotifSet {
    pub fn new(mut motifs: Vec<Motif>) -> Result<Self> {
        motifs.sort_by(|a, b| b.size().cmp(&a.size()).then_with(|| a.name.cmp(&b.name)));
        let mut names: Vec<&str> = motifs.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidMotifSet(format!(
                "duplicate motif `{}`",
                w[0]
            )));
        }
        match motifs.iter().find(|m| m.name == "M2") {
            Some(m) if m.is_single_edge() => {}
            Some(_) => return Err(Error::InvalidMotifSet("`M2` must be a single edge".into())),
            None => return Err(Error::InvalidMotifSet("motif set must contain M2".into())),
        }
        Ok(MotifSet { motifs })
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let motifs = names
            .iter()
            .map(|n| builtin_motif(n.as_ref().trim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(motifs)
    }

    /// Accepts a topology name (`heavy-hex`, `square-grid`, `generic`) or a
    /// comma-separated list of catalog names.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Ok(topology) = spec.parse::<Topology>() {
            return Ok(default_motif_set(topology));
        }
        let names: Vec<&str> = spec.split(',').filter(|s| !s.trim().is_empty()).collect();
        Self::from_names(&names)
    }

    /// Descending size order.
    pub fn motifs(&self) -> &[Motif] {
        &self.motifs
    }

    pub fn get(&self, name: &str) -> Option<&Motif> {
        self.motifs.iter().find(|m| m.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.motifs.iter().map(|m| m.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.motifs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motifs.is_empty()
    }
}

impl fmt::Display for MotifSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names().join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    HeavyHex,
    SquareGrid,
    Generic,
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heavy-hex" => Ok(Topology::HeavyHex),
            "square-grid" => Ok(Topology::SquareGrid),
            "generic" => Ok(Topology::Generic),
            other => Err(Error::InvalidArgument(format!(
                "unknown topology `{other}`"
            ))),
        }
    }
}

pub fn default_motif_set(topology: Topology) -> MotifSet {
    let names: &[&str] = match topology {
        Topology::HeavyHex => &["M4", "M2"],
        Topology::SquareGrid => &["M6-O", "M4-O", "M2"],
        Topology::Generic => &["M3", "M2"],
    };
    MotifSet::from_names(names).expect("default motif sets are valid")
}
