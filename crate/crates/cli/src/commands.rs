use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spansim_core::broadcast::{self, BroadcastInstance, PredictedComplexity};
use spansim_core::generate::{generate, GraphModel};
use spansim_core::graph::{parse_graph_with_comments, write_graph};
use spansim_core::{MultiGraph, Params};

use crate::args::{auto_h, BroadcastArgs, Command, Format, GenArgs, ModelKind, RunArgs, SweepArgs};
use crate::record::{self, execute, GraphDescriptor, Mode, RunRecord, SpannerRecord};
use crate::{Cli, CliError, Outcome};

pub fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Gen(a) => gen(&a),
        Command::Run(a) => run(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Broadcast(a) => broadcast_cmd(&a),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

pub fn read_graph(path: &Path) -> Result<(MultiGraph, Vec<String>), CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_graph_with_comments(&text).map_err(|source| CliError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

fn need<T>(v: Option<T>, flag: &str, model: ModelKind) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for model {model:?}")))
}

pub fn model_from_args(a: &GenArgs) -> Result<GraphModel, CliError> {
    let m = a.model;
    Ok(match m {
        ModelKind::Gnp => GraphModel::Gnp {
            n: need(a.n, "n", m)?,
            p: need(a.p, "p", m)?,
        },
        ModelKind::Complete => GraphModel::Complete {
            n: need(a.n, "n", m)?,
        },
        ModelKind::Cycle => GraphModel::Cycle {
            n: need(a.n, "n", m)?,
        },
        ModelKind::Path => GraphModel::Path {
            n: need(a.n, "n", m)?,
        },
        ModelKind::Star => GraphModel::Star {
            n: need(a.n, "n", m)?,
        },
        ModelKind::Grid => GraphModel::Grid {
            rows: need(a.rows, "rows", m)?,
            cols: need(a.cols, "cols", m)?,
        },
        ModelKind::Barbell => GraphModel::Barbell {
            clique: need(a.clique, "clique", m)?,
            bridge: need(a.bridge, "bridge", m)?,
        },
    })
}

/// Model with about `n` nodes, for sweeps: grids are as square as possible,
/// barbells split `n` into two cliques and a short bridge.
pub fn model_for_size(kind: ModelKind, n: usize, p: Option<f64>) -> Result<GraphModel, CliError> {
    Ok(match kind {
        ModelKind::Gnp => GraphModel::Gnp {
            n,
            p: need(p, "p", kind)?,
        },
        ModelKind::Complete => GraphModel::Complete { n },
        ModelKind::Cycle => GraphModel::Cycle { n },
        ModelKind::Path => GraphModel::Path { n },
        ModelKind::Star => GraphModel::Star { n },
        ModelKind::Grid => {
            let rows = ((n as f64).sqrt().floor() as usize).max(1);
            GraphModel::Grid {
                rows,
                cols: (n / rows).max(1),
            }
        }
        ModelKind::Barbell => {
            let clique = (n.saturating_sub(2) / 2).max(1);
            GraphModel::Barbell {
                clique,
                bridge: n.saturating_sub(2 * clique),
            }
        }
    })
}

fn gen(a: &GenArgs) -> Result<Outcome, CliError> {
    let g = generate(model_from_args(a)?, a.seed)?;
    emit(a.out.as_ref(), &write_graph(&g.graph, &g.comments()))?;
    Ok(Outcome::Passed)
}

fn render(records: &[RunRecord], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = String::new();
            for r in records {
                s.push_str(&serde_json::to_string(r)?);
                s.push('\n');
            }
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(record::CSV_HEADER)?;
            for r in records {
                w.write_record(record::csv_row(r))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn outcome(records: &[RunRecord]) -> Outcome {
    if records.iter().all(|r| r.verification.passed) {
        Outcome::Passed
    } else {
        Outcome::Violations
    }
}

fn run(a: &RunArgs) -> Result<Outcome, CliError> {
    let (g, comments) = read_graph(&a.graph)?;
    let n = g.node_count();
    let h = a.h.resolve(|| auto_h(n));
    let params = Params::new(n, a.k, h, a.c, a.seed)?.with_budget_scale(a.budget_scale)?;
    let bound = a.stretch_bound.resolve(|| params.stretch_bound());
    let desc = GraphDescriptor::from_file(&g, &a.graph.display().to_string(), &comments);
    let out = execute(&g, desc, &params, a.mode, Some(bound), a.timing)?;
    if let Some(path) = &a.spanner_out {
        let text = serde_json::to_string(&out.spanner_record())?;
        fs::write(path, text + "\n").map_err(io_err(path))?;
    }
    let records = [out.record];
    emit(a.out.as_ref(), &render(&records, a.format)?)?;
    Ok(outcome(&records))
}

/// One grid point of a sweep.
#[derive(Debug, Clone)]
struct Job {
    graph: usize,
    k: u32,
    h: crate::args::Auto<u32>,
    c: f64,
    scale: f64,
    mode: Mode,
    seed: u64,
}

pub fn sweep_records(a: &SweepArgs) -> Result<Vec<RunRecord>, CliError> {
    let mut graphs = Vec::new();
    for &n in &a.n {
        let g = generate(model_for_size(a.model, n, a.p)?, a.graph_seed)?;
        let desc = GraphDescriptor {
            model: g.model.to_string(),
            source: None,
            n: g.graph.node_count(),
            m: g.graph.edge_count(),
            seed: Some(a.graph_seed),
        };
        graphs.push((g.graph, desc));
    }
    let mut jobs = Vec::new();
    for graph in 0..graphs.len() {
        for &k in &a.k {
            for &h in &a.h {
                for &c in &a.c {
                    for &scale in &a.budget_scale {
                        for &mode in &a.mode {
                            for seed in 0..a.seeds {
                                jobs.push(Job {
                                    graph,
                                    k,
                                    h,
                                    c,
                                    scale,
                                    mode,
                                    seed,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    // validate every parameter point before spending time on runs
    let params: Vec<Params> = jobs
        .iter()
        .map(|j| {
            let g = &graphs[j.graph].0;
            let n = g.node_count();
            Ok(Params::new(n, j.k, j.h.resolve(|| auto_h(n)), j.c, j.seed)?
                .with_budget_scale(j.scale)?)
        })
        .collect::<Result<_, CliError>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| {
        jobs.par_iter()
            .zip(params.par_iter())
            .map(|(j, p)| {
                let (g, desc) = &graphs[j.graph];
                Ok(execute(g, desc.clone(), p, j.mode, None, false)?.record)
            })
            .collect()
    })
}

fn sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let records = sweep_records(a)?;
    emit(a.out.as_ref(), &render(&records, a.format)?)?;
    Ok(outcome(&records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastRecord {
    pub n: usize,
    pub m: usize,
    pub spanner_size: usize,
    pub t: u32,
    pub alpha: u64,
    pub rounds: u64,
    pub messages: u64,
    pub payload_transmissions: u64,
    pub activation_bound: u64,
    pub misses: usize,
    pub complete: bool,
    pub passed: bool,
    /// Formula evaluation for the spanner's `k`, not a measurement.
    pub predicted: PredictedComplexity,
}

pub fn load_spanner(path: &Path, g: &MultiGraph) -> Result<SpannerRecord, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let rec: SpannerRecord = serde_json::from_str(&text)
        .map_err(|e| CliError::SpannerRecord(format!("{}: {e}", path.display())))?;
    if rec.n != g.node_count() || rec.m != g.edge_count() {
        return Err(CliError::SpannerRecord(format!(
            "record is for a graph with n={} m={}, graph has n={} m={}",
            rec.n,
            rec.m,
            g.node_count(),
            g.edge_count()
        )));
    }
    if let Some(e) = rec.spanner_edges.iter().find(|&&e| !g.contains_edge(e)) {
        return Err(CliError::SpannerRecord(format!(
            "edge {e} is not in the graph"
        )));
    }
    Ok(rec)
}

fn broadcast_cmd(a: &BroadcastArgs) -> Result<Outcome, CliError> {
    let (g, _) = read_graph(&a.graph)?;
    let rec = load_spanner(&a.spanner, &g)?;
    let inst = BroadcastInstance {
        t: a.t,
        alpha: a.alpha.resolve(|| rec.stretch_bound),
        spanner_edges: rec.spanner_edges.clone(),
        messages: (0..g.node_count())
            .map(|v| (v as u64).to_le_bytes().to_vec())
            .collect(),
    };
    let report = broadcast::run_and_check(&g, &inst);
    let out = BroadcastRecord {
        n: g.node_count(),
        m: g.edge_count(),
        spanner_size: rec.spanner_edges.len(),
        t: a.t,
        alpha: inst.alpha,
        rounds: report.rounds,
        messages: report.messages,
        payload_transmissions: report.payload_transmissions,
        activation_bound: report.activation_bound,
        misses: report.misses.len(),
        complete: report.misses.is_empty(),
        passed: report.passed(),
        predicted: broadcast::predicted_complexity(g.node_count(), a.t, rec.k),
    };
    emit(a.out.as_ref(), &(serde_json::to_string(&out)? + "\n"))?;
    Ok(if out.passed {
        Outcome::Passed
    } else {
        Outcome::Violations
    })
}
