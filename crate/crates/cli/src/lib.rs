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

//! Command-line front end: enumeration, database caching, benchmarks and
//! layout selection. `main` only parses arguments and maps errors to exit
//! codes; everything else lives here so tests can drive it directly.

mod bench;
mod commands;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use delta_motif::{MatchMode, MotifSet};

pub use bench::{run_bench, write_report, BenchRecord, REPORT_HEADER};

#[derive(Debug, Parser)]
#[command(
    name = "delta-motif",
    version,
    about = "Subgraph enumeration by motif decomposition"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate every mapping of a pattern into a data graph.
    Enumerate(EnumerateArgs),
    /// Build a motif database and store it in a directory.
    BuildDb(BuildDbArgs),
    /// Compare engines on sampled patterns from a lattice.
    Bench(BenchArgs),
    /// Rank pattern layouts on a device by fidelity.
    Layout(LayoutArgs),
    /// Write a lattice or a sampled pattern as an edge list.
    Generate(GenerateArgs),
    /// List the motif catalog and default sets.
    Motifs(MotifsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Mono,
    Induced,
}

impl From<Mode> for MatchMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Mono => MatchMode::Monomorphism,
            Mode::Induced => MatchMode::Induced,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Delta,
    Vf2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lattice {
    HeavyHex,
    SquareGrid,
}

/// Motif sets are validated while parsing so a bad name is a usage error.
fn parse_motifs(spec: &str) -> std::result::Result<MotifSet, String> {
    MotifSet::parse(spec).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Data graph (edge list, or MatrixMarket when the name ends in .mtx).
    #[arg(long)]
    pub data: PathBuf,
    /// Pattern graph, same formats as --data.
    #[arg(long)]
    pub pattern: PathBuf,
    /// Topology name or comma-separated motif names.
    #[arg(long, default_value = "generic", value_parser = parse_motifs)]
    pub motifs: MotifSet,
    #[arg(long, value_enum, default_value = "mono")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "delta")]
    pub engine: Engine,
    /// Database directory from build-db; skips the build for the delta engine.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Where to write the sorted mapping table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildDbArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "generic", value_parser = parse_motifs)]
    pub motifs: MotifSet,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum BenchEngine {
    DeltaMotif,
    DeltaMotifCached,
    Vf2,
}

impl BenchEngine {
    pub fn name(self) -> &'static str {
        match self {
            BenchEngine::DeltaMotif => "delta-motif",
            BenchEngine::DeltaMotifCached => "delta-motif-cached",
            BenchEngine::Vf2 => "vf2",
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub topology: Lattice,
    /// Approximate vertex count of the lattice.
    #[arg(long)]
    pub size: usize,
    #[arg(long, value_delimiter = ',', default_value = "20")]
    pub pattern_sizes: Vec<usize>,
    /// Patterns per size; seeds run from --first-seed upward.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    /// Semicolon-separated motif sets; defaults to the topology's own set.
    #[arg(long, value_delimiter = ';', value_parser = parse_motifs)]
    pub motif_sets: Vec<MotifSet>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "delta-motif,delta-motif-cached,vf2"
    )]
    pub engines: Vec<BenchEngine>,
    #[arg(long, value_enum, default_value = "mono")]
    pub mode: Mode,
    /// Runs per engine and case; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Run cases concurrently. Timings are then unreliable; use for
    /// correctness sweeps.
    #[arg(long)]
    pub parallel_cases: bool,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    /// Device file with node and edge fidelities.
    #[arg(long)]
    pub device: PathBuf,
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long, default_value = "generic", value_parser = parse_motifs)]
    pub motifs: MotifSet,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Database directory built on the device's coupling graph.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Ranked layouts as CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Timing breakdown as JSON; printed to standard error when absent.
    #[arg(long)]
    pub timing: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub topology: Lattice,
    /// Approximate vertex count of the lattice.
    #[arg(long)]
    pub size: usize,
    /// Sample a connected pattern of this many vertices from the lattice.
    #[arg(long)]
    pub pattern_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MotifsArgs {
    /// Also write each template as `<name>.txt` edge list into this directory.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Enumerate(args) => commands::enumerate(&args),
        Command::BuildDb(args) => commands::build_db(&args),
        Command::Bench(args) => bench::bench(&args),
        Command::Layout(args) => commands::layout(&args),
        Command::Generate(args) => commands::generate(&args),
        Command::Motifs(args) => commands::motifs(&args),
    }
}
