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

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown motif `{name}` (catalog: {catalog})")]
    UnknownMotif { name: String, catalog: String },

    #[error("invalid motif `{name}`: {reason}")]
    InvalidMotif { name: String, reason: String },

    #[error("invalid motif set: {0}")]
    InvalidMotifSet(String),

    #[error("pattern graph is not connected")]
    DisconnectedPattern,

    #[error("cannot sample a connected subgraph of {requested} vertices: {reason}")]
    Sampling { requested: usize, reason: String },

    #[error("join error: {0}")]
    Join(String),

    #[error("table error: {0}")]
    Table(String),

    #[error(
        "memory budget exceeded while computing {context}: {rows} rows > limit {limit}; \
         try a different motif set"
    )]
    MemoryBudget {
        context: String,
        rows: usize,
        limit: usize,
    },

    #[error("database fingerprint mismatch: stored {stored}, graph has {actual}")]
    FingerprintMismatch { stored: String, actual: String },

    #[error("corrupt file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("missing fidelity for {0}")]
    MissingFidelity(String),

    #[error("fidelity {value} for {what} outside (0, 1]")]
    FidelityRange { what: String, value: f64 },

    #[error("scores not attached to motif `{0}`")]
    MissingScores(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn corrupt(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Corrupt {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
