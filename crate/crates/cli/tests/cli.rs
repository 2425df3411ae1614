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

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delta-motif"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

struct Fixture {
    dir: TempDir,
    k4: PathBuf,
    triangle: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(dir.path(), "k4.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let triangle = write(dir.path(), "tri.txt", "0 1\n1 2\n2 0\n");
    Fixture { dir, k4, triangle }
}

impl Fixture {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn enumerate(&self, out: &str, extra: &[&str]) -> (Output, Vec<u8>) {
        let out_path = self.path(out);
        let mut args = vec![
            "enumerate",
            "--data",
            self.k4.to_str().unwrap(),
            "--pattern",
            self.triangle.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let bytes = std::fs::read(out_path).unwrap();
        (o, bytes)
    }
}

#[test]
fn enumerate_counts_triangles_in_k4() {
    let f = fixture();
    let (o, csv) = f.enumerate("delta.csv", &["--motifs", "M3,M2"]);
    assert!(stdout(&o).starts_with("count 24\n"), "{}", stdout(&o));
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 2 + 24);
    assert!(text.lines().nth(1).unwrap() == "0,1,2");
}

#[test]
fn engines_and_motif_sets_write_identical_bytes() {
    let f = fixture();
    let (_, delta) = f.enumerate("a.csv", &["--motifs", "M3,M2"]);
    let (_, m2) = f.enumerate("b.csv", &["--motifs", "M2"]);
    let (_, vf2) = f.enumerate("c.csv", &["--engine", "vf2"]);
    let (_, again) = f.enumerate("d.csv", &["--motifs", "M3,M2"]);
    assert_eq!(delta, m2);
    assert_eq!(delta, vf2);
    assert_eq!(delta, again);
    let (_, induced) = f.enumerate("e.csv", &["--mode", "induced", "--engine", "vf2"]);
    let (_, induced_delta) = f.enumerate("f.csv", &["--mode", "induced"]);
    assert_eq!(induced, induced_delta);
}

#[test]
fn cached_database_gives_same_rows_without_prep() {
    let f = fixture();
    let db = f.path("db");
    let o = run(&[
        "build-db",
        "--data",
        f.k4.to_str().unwrap(),
        "--motifs",
        "M3,M2",
        "--out",
        db.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("M3 rows 24"));
    assert!(db.join("manifest.json").exists());
    let (o, cached) = f.enumerate("cached.csv", &["--db", db.to_str().unwrap()]);
    assert!(stdout(&o).contains("prep_seconds 0.000000"));
    let (_, fresh) = f.enumerate("fresh.csv", &[]);
    assert_eq!(cached, fresh);

    // a database for another graph is refused
    let other = write(f.dir.path(), "path.txt", "0 1\n1 2\n");
    let o = run(&[
        "enumerate",
        "--data",
        other.to_str().unwrap(),
        "--pattern",
        f.triangle.to_str().unwrap(),
        "--db",
        db.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_2() {
    let f = fixture();
    let k4 = f.k4.to_str().unwrap();
    let tri = f.triangle.to_str().unwrap();
    for args in [
        vec!["bench", "--topology", "torus", "--size", "10"],
        vec![
            "enumerate",
            "--data",
            k4,
            "--pattern",
            tri,
            "--motifs",
            "M10,M2",
        ],
        vec![
            "enumerate",
            "--data",
            k4,
            "--pattern",
            tri,
            "--engine",
            "gpu",
        ],
        vec!["enumerate", "--data", k4],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn runtime_failures_exit_with_1() {
    let f = fixture();
    let missing = f.path("missing.txt");
    let o = run(&[
        "enumerate",
        "--data",
        missing.to_str().unwrap(),
        "--pattern",
        f.triangle.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.txt"));

    let k5 = write(
        f.dir.path(),
        "k5.txt",
        "0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n",
    );
    let o = bin()
        .args([
            "build-db",
            "--data",
            k5.to_str().unwrap(),
            "--motifs",
            "M3,M2",
            "--out",
            f.path("db").to_str().unwrap(),
        ])
        .env("DELTA_MOTIF_MAX_ROWS", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).to_lowercase().contains("memory"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn bench_with_no_seeds_writes_an_empty_report() {
    let o = run(&[
        "bench",
        "--topology",
        "square-grid",
        "--size",
        "100",
        "--seeds",
        "0",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(text.starts_with("# delta-motif bench v1\ndata_graph,"));
}

#[test]
fn bench_engines_agree_on_a_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = run(&[
        "bench",
        "--topology",
        "square-grid",
        "--size",
        "100",
        "--pattern-sizes",
        "10",
        "--seeds",
        "20",
        "--motif-sets",
        "M2;M4-O,M2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(out)
        .unwrap();
    let head = reader.headers().unwrap().clone();
    let col = |name: &str| head.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 20 * 2 * 3);
    assert!(rows.iter().all(|r| &r[col("agree")] == "true"));
    for r in rows
        .iter()
        .filter(|r| &r[col("engine")] == "delta-motif-cached")
    {
        assert_eq!(r[col("prep_seconds")].parse::<f64>().unwrap(), 0.0);
        assert!(!r[col("speedup_vs_cached")].is_empty());
    }
    let sets: std::collections::BTreeSet<&str> = rows
        .iter()
        .map(|r| r.get(col("motif_set")).unwrap())
        .collect();
    assert_eq!(sets.into_iter().collect::<Vec<_>>(), ["M2", "M4-O,M2"]);
}

#[test]
fn bench_records_budget_failures_and_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = bin()
        .args([
            "bench",
            "--topology",
            "square-grid",
            "--size",
            "100",
            "--pattern-sizes",
            "6",
            "--seeds",
            "3",
            "--engines",
            "delta-motif,vf2",
            "--out",
            out.to_str().unwrap(),
        ])
        .env("DELTA_MOTIF_MAX_ROWS", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("failed"), "{}", stderr(&o));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(out)
        .unwrap();
    let head = reader.headers().unwrap().clone();
    let col = |name: &str| head.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3 * 2);
    for r in &rows {
        assert!(r[col("error")].contains("memory budget"), "{r:?}");
        assert!(r[col("solutions")].is_empty());
    }
}

#[test]
fn heavy_hex_bench_runs_in_parallel_mode() {
    let o = run(&[
        "bench",
        "--topology",
        "heavy-hex",
        "--size",
        "200",
        "--pattern-sizes",
        "8,12",
        "--seeds",
        "4",
        "--engines",
        "delta-motif-cached,vf2",
        "--parallel-cases",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 2 + 2 * 4 * 2);
}

#[test]
fn layout_ranks_and_reports_timing() {
    let dir = tempfile::tempdir().unwrap();
    // 2x3 grid: 0-1-2 over 3-4-5
    let device = write(
        dir.path(),
        "device.txt",
        "nodes 6\nnode 0 0.99\nnode 1 0.98\nnode 2 0.97\nnode 3 0.96\nnode 4 0.95\nnode 5 0.94\n\
         edge 0 1 0.99\nedge 1 2 0.98\nedge 3 4 0.97\nedge 4 5 0.96\nedge 0 3 0.95\nedge 1 4 0.94\nedge 2 5 0.93\n",
    );
    let pattern = write(dir.path(), "p.txt", "0 1\n");
    let out = dir.path().join("layouts.csv");
    let timing = dir.path().join("timing.json");
    let o = run(&[
        "layout",
        "--device",
        device.to_str().unwrap(),
        "--pattern",
        pattern.to_str().unwrap(),
        "--top-k",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--timing",
        timing.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    // best edge is 0-1: 0.99 * 0.98 * 0.99, either direction
    assert!(
        rows[0].starts_with("0,1,") || rows[0].starts_with("1,0,"),
        "{csv}"
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(timing).unwrap()).unwrap();
    assert_eq!(json["layouts"], 14);
    assert!(json["total_seconds"].as_f64().unwrap() >= 0.0);

    let o = run(&[
        "layout",
        "--device",
        device.to_str().unwrap(),
        "--pattern",
        pattern.to_str().unwrap(),
        "--top-k",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generated_pattern_is_found_in_its_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    let pattern = dir.path().join("pattern.txt");
    assert!(run(&[
        "generate",
        "--topology",
        "square-grid",
        "--size",
        "36",
        "--out",
        grid.to_str().unwrap()
    ])
    .status
    .success());
    let o = run(&[
        "generate",
        "--topology",
        "square-grid",
        "--size",
        "36",
        "--pattern-size",
        "6",
        "--seed",
        "3",
        "--out",
        pattern.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = run(&[
        "enumerate",
        "--data",
        grid.to_str().unwrap(),
        "--pattern",
        pattern.to_str().unwrap(),
        "--motifs",
        "square-grid",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let count: usize = stdout(&o)
        .lines()
        .next()
        .unwrap()
        .strip_prefix("count ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(count > 0);
}

#[test]
fn motif_templates_export_as_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["motifs", "--export", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("M6-2O    vertices  6 edges  7"));
    let text = std::fs::read_to_string(dir.path().join("M4-O.txt")).unwrap();
    assert_eq!(text, "# vertices 4 edges 4\n0 1\n0 3\n1 2\n2 3\n");
}
