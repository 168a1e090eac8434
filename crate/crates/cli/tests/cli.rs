use std::path::Path;
use std::process::{Command, Output};

use spansim_cli::record::CSV_HEADER;
use spansim_cli::RunRecord;

fn spansim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spansim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", &path]);
    let out = spansim(&all);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

fn header(path: &str) -> (usize, usize) {
    let text = std::fs::read_to_string(path).unwrap();
    let line = text.lines().find(|l| !l.starts_with('#')).unwrap();
    let mut it = line.split_whitespace().map(|x| x.parse().unwrap());
    (it.next().unwrap(), it.next().unwrap())
}

#[test]
fn gen_edge_counts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        header(&gen(dir.path(), "k4", &["--model", "complete", "--n", "4"])),
        (4, 6)
    );
    assert_eq!(
        header(&gen(dir.path(), "c8", &["--model", "cycle", "--n", "8"])),
        (8, 8)
    );
    let full = gen(
        dir.path(),
        "g",
        &["--model", "gnp", "--n", "100", "--p", "1.0"],
    );
    assert_eq!(header(&full), (100, 4950));
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(
        dir.path(),
        "a",
        &["--model", "gnp", "--n", "80", "--p", "0.1", "--seed", "4"],
    );
    let b = gen(
        dir.path(),
        "b",
        &["--model", "gnp", "--n", "80", "--p", "0.1", "--seed", "4"],
    );
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn run_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen(dir.path(), "e", &["--model", "path", "--n", "2"]);
    let out = spansim(&["run", "--graph", &g, "--k", "1", "--h", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rec: RunRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec.spanner_size, 1);
    assert_eq!(rec.max_stretch, Some(1));
    assert_eq!(rec.graph.model, "path n=2");
}

#[test]
fn run_path_keeps_every_edge() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen(dir.path(), "p", &["--model", "path", "--n", "32"]);
    for mode in ["centralized", "distributed"] {
        let out = spansim(&["run", "--graph", &g, "--k", "2", "--mode", mode]);
        assert_eq!(out.status.code(), Some(0));
        let rec: RunRecord = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(rec.spanner_size, 31);
        assert_eq!(rec.counters.is_some(), mode == "distributed");
    }
}

#[test]
fn run_both_modes_on_complete_64() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen(dir.path(), "k", &["--model", "complete", "--n", "64"]);
    let mut sizes = Vec::new();
    for mode in ["centralized", "distributed"] {
        let args = [
            "run", "--graph", &g, "--k", "1", "--h", "6", "--c", "4", "--seed", "7", "--mode", mode,
        ];
        let out = spansim(&args);
        assert_eq!(out.status.code(), Some(0));
        let rec: RunRecord = serde_json::from_slice(&out.stdout).unwrap();
        assert!(rec.verification.passed);
        sizes.push(rec.spanner_size);
        // identical invocations give identical output
        assert_eq!(spansim(&args).stdout, out.stdout);
    }
    assert_eq!(sizes[0], sizes[1]);
}

#[test]
fn violations_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen(dir.path(), "k", &["--model", "complete", "--n", "64"]);
    // a small c leaves heavy nodes, so S misses edges and stretch 1 cannot hold
    let out = spansim(&[
        "run",
        "--graph",
        &g,
        "--k",
        "1",
        "--c",
        "0.1",
        "--stretch-bound",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let rec: RunRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rec.verification.stretch_violations > 0);
    assert_eq!(rec.verified_stretch_bound, 1);
}

#[test]
fn usage_and_io_errors_exit_with_one() {
    assert_eq!(spansim(&["run"]).status.code(), Some(1));
    assert_eq!(spansim(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        spansim(&["run", "--graph", "/nonexistent/graph.txt"])
            .status
            .code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let g = gen(dir.path(), "p", &["--model", "path", "--n", "4"]);
    assert_eq!(
        spansim(&["run", "--graph", &g, "--k", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        spansim(&["run", "--graph", &g, "--c", "-1"]).status.code(),
        Some(1)
    );
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 1\n0 0\n").unwrap();
    assert_eq!(
        spansim(&["run", "--graph", bad.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        spansim(&["gen", "--model", "gnp", "--n", "5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(spansim(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_rows_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("s.csv");
    let out = spansim(&[
        "sweep",
        "--model",
        "gnp",
        "--n",
        "256,512",
        "--p",
        "0.05",
        "--seeds",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut rdr = csv::Reader::from_path(&out_path).unwrap();
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        for col in [0, 1, 2, 3, 7, 10, 11, 12] {
            row[col].parse::<u64>().unwrap();
        }
        row[4].parse::<f64>().unwrap();
        row[5].parse::<f64>().unwrap();
        assert_eq!(&row[6], "centralized");
    }
    // sorted by n, then seed
    assert!(rows[0][0].parse::<u64>().unwrap() <= rows[3][0].parse::<u64>().unwrap());
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let args = |jobs: &'static str| {
        vec![
            "sweep",
            "--model",
            "grid",
            "--n",
            "64,100",
            "--k",
            "1,2",
            "--seeds",
            "2",
            "--mode",
            "centralized,distributed",
            "--format",
            "json",
            "--jobs",
            jobs,
        ]
    };
    let a = spansim(&args("1"));
    let b = spansim(&args("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 16);
}

#[test]
fn broadcast_over_saved_spanner() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen(
        dir.path(),
        "g",
        &["--model", "gnp", "--n", "120", "--p", "0.1", "--seed", "2"],
    );
    let s = dir.path().join("s.json").display().to_string();
    let out = spansim(&["run", "--graph", &g, "--k", "1", "--spanner-out", &s]);
    assert_eq!(out.status.code(), Some(0));

    for (t, alpha, rounds) in [("0", "auto", 0), ("2", "5", 10), ("3", "auto", 15)] {
        let out = spansim(&[
            "broadcast",
            "--graph",
            &g,
            "--spanner",
            &s,
            "--t",
            t,
            "--alpha",
            alpha,
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["rounds"], rounds);
        assert_eq!(v["complete"], true);
        if t == "0" {
            assert_eq!(v["messages"], 0);
        }
    }

    let other = gen(dir.path(), "o", &["--model", "cycle", "--n", "9"]);
    let out = spansim(&["broadcast", "--graph", &other, "--spanner", &s, "--t", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = spansim(&[
        "broadcast",
        "--graph",
        &g,
        "--spanner",
        "/nonexistent.json",
        "--t",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn broadcast_identity_spanner() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen(dir.path(), "c", &["--model", "cycle", "--n", "8"]);
    let s = dir.path().join("s.json");
    let rec = spansim_cli::SpannerRecord {
        n: 8,
        m: 8,
        k: 1,
        seed: 0,
        stretch_bound: 1,
        spanner_edges: (0..8).collect(),
    };
    std::fs::write(&s, serde_json::to_string(&rec).unwrap()).unwrap();
    let out = spansim(&[
        "broadcast",
        "--graph",
        &g,
        "--spanner",
        s.to_str().unwrap(),
        "--t",
        "2",
        "--alpha",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rounds"], 2);

    // dropping an edge with alpha 1 misses the far side
    let rec = spansim_cli::SpannerRecord {
        spanner_edges: (1..8).collect(),
        ..rec
    };
    std::fs::write(&s, serde_json::to_string(&rec).unwrap()).unwrap();
    let out = spansim(&[
        "broadcast",
        "--graph",
        &g,
        "--spanner",
        s.to_str().unwrap(),
        "--t",
        "1",
        "--alpha",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
