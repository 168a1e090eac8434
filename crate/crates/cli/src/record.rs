//! Structured run output: one [`RunRecord`] per sampler execution.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use spansim_core::sampler::{LevelStats, SamplerError};
use spansim_core::verify::{self, BoundCheck, NodeCountCheck, VerificationReport};
use spansim_core::{
    run_distributed_sampler, sampler, Counters, EdgeId, MultiGraph, Params, SpannerResult,
};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Centralized,
    Distributed,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Centralized => "centralized",
            Mode::Distributed => "distributed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDescriptor {
    /// Generator description, or `"file"` for graphs without one.
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub n: usize,
    pub m: usize,
    pub seed: Option<u64>,
}

impl GraphDescriptor {
    /// Describes a graph read from `source`, taking the model and seed from
    /// the first header comment when it has the generator's `"<model> ... seed=<s>"` form.
    pub fn from_file(g: &MultiGraph, source: &str, comments: &[String]) -> Self {
        let (model, seed) = match comments.first() {
            Some(line) => match line.rsplit_once(" seed=") {
                Some((model, seed)) => (model.to_string(), seed.trim().parse().ok()),
                None => ("file".to_string(), None),
            },
            None => ("file".to_string(), None),
        };
        Self {
            model,
            source: Some(source.to_string()),
            n: g.node_count(),
            m: g.edge_count(),
            seed,
        }
    }
}

/// Condensed [`VerificationReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub passed: bool,
    pub violations: usize,
    pub stretch_violations: usize,
    pub diameter_violations: usize,
    /// Largest cluster diameter per level; `None` for a disconnected cluster.
    pub max_cluster_diameter: Vec<Option<usize>>,
    pub partition_ok: bool,
    pub edge_budget_ok: bool,
    pub edge_budget_bound: f64,
    /// `|S| / (k h n^(1+delta) log^3 n)`.
    pub size_ratio: f64,
    pub node_counts: Vec<NodeCountCheck>,
    pub messages: Option<BoundCheck>,
    pub rounds: Option<BoundCheck>,
    pub failures: usize,
}

impl From<&VerificationReport> for VerificationSummary {
    fn from(r: &VerificationReport) -> Self {
        Self {
            passed: r.passed(),
            violations: r.violation_count() + r.failures.len(),
            stretch_violations: r.stretch.violations.len(),
            diameter_violations: r.diameters.violations.len(),
            max_cluster_diameter: r.diameters.levels.iter().map(|l| l.max_diameter).collect(),
            partition_ok: r.partition.ok,
            edge_budget_ok: r.counts.edges.within,
            edge_budget_bound: r.counts.edges.budget_bound,
            size_ratio: r.counts.edges.ratio,
            node_counts: r.counts.nodes.clone(),
            messages: r.counts.messages.clone(),
            rounds: r.counts.rounds.clone(),
            failures: r.failures.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub params: Params,
    pub graph: GraphDescriptor,
    pub mode: Mode,
    pub spanner_size: usize,
    pub stretch_bound: u64,
    /// Bound the stretch was verified against.
    pub verified_stretch_bound: u64,
    pub max_stretch: Option<usize>,
    /// Only distributed runs send messages.
    pub counters: Option<Counters>,
    pub levels: Vec<LevelStats>,
    pub verification: VerificationSummary,
    /// Present only when timing was requested; omitted so records stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

/// The spanner edges of a run, for later broadcast experiments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpannerRecord {
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub seed: u64,
    pub stretch_bound: u64,
    pub spanner_edges: Vec<EdgeId>,
}

/// Everything one run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub result: SpannerResult,
    pub report: VerificationReport,
}

impl RunOutput {
    pub fn spanner_record(&self) -> SpannerRecord {
        SpannerRecord {
            n: self.record.graph.n,
            m: self.record.graph.m,
            k: self.record.params.k,
            seed: self.record.params.seed,
            stretch_bound: self.result.stretch_bound,
            spanner_edges: self.result.spanner_edges.clone(),
        }
    }
}

/// Runs the sampler in `mode`, verifies the output and builds its record.
/// `stretch_bound` overrides the bound used for the stretch check.
pub fn execute(
    g: &MultiGraph,
    graph: GraphDescriptor,
    params: &Params,
    mode: Mode,
    stretch_bound: Option<u64>,
    timing: bool,
) -> Result<RunOutput, SamplerError> {
    let start = Instant::now();
    let (result, assignment, counters) = match mode {
        Mode::Centralized => {
            let r = sampler(g, params)?;
            (r.result, r.assignment, None)
        }
        Mode::Distributed => {
            let r = run_distributed_sampler(g, params)?;
            (r.result, r.assignment, Some(r.counters))
        }
    };
    let elapsed = start.elapsed();
    let mut report = verify::verify_run(g, params, &result, &assignment, counters.as_ref());
    let bound = stretch_bound.unwrap_or(result.stretch_bound);
    if bound != result.stretch_bound {
        report.stretch = verify::check_stretch(g, &result.spanner_edges, bound);
    }
    let record = RunRecord {
        params: params.clone(),
        graph,
        mode,
        spanner_size: result.len(),
        stretch_bound: result.stretch_bound,
        verified_stretch_bound: bound,
        max_stretch: report.stretch.max_stretch,
        counters,
        levels: result.levels.clone(),
        verification: VerificationSummary::from(&report),
        wall_time_ms: timing.then_some(elapsed.as_secs_f64() * 1e3),
    };
    Ok(RunOutput {
        record,
        result,
        report,
    })
}

/// Column names of the sweep table, in order.
pub const CSV_HEADER: [&str; 13] = [
    "n",
    "m",
    "k",
    "h",
    "c",
    "budget_scale",
    "mode",
    "|S|",
    "messages",
    "rounds",
    "max_stretch",
    "violations",
    "failures",
];

/// One sweep-table row. Centralized runs leave `messages` and `rounds`
/// empty; a disconnected stretch leaves `max_stretch` empty.
pub fn csv_row(r: &RunRecord) -> Vec<String> {
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    vec![
        r.graph.n.to_string(),
        r.graph.m.to_string(),
        r.params.k.to_string(),
        r.params.h.to_string(),
        r.params.c.to_string(),
        r.params.budget_scale.to_string(),
        r.mode.as_str().to_string(),
        r.spanner_size.to_string(),
        opt(r.counters.as_ref().map(|c| c.total_messages)),
        opt(r.counters.as_ref().map(|c| c.rounds_elapsed)),
        opt(r.max_stretch.map(|s| s as u64)),
        r.verification.violations.to_string(),
        r.verification.failures.to_string(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use spansim_core::generate;

    #[test]
    fn descriptor_from_generator_comment() {
        let g = generate::path(4);
        let d = GraphDescriptor::from_file(&g, "p.txt", &["path n=4 seed=9".into()]);
        assert_eq!(d.model, "path n=4");
        assert_eq!(d.seed, Some(9));
        let d = GraphDescriptor::from_file(&g, "p.txt", &[]);
        assert_eq!((d.model.as_str(), d.seed), ("file", None));
    }

    #[test]
    fn single_edge_record() {
        let g = generate::path(2);
        let p = Params::new(2, 1, 1, 4.0, 0).unwrap();
        let d = GraphDescriptor::from_file(&g, "x", &[]);
        let out = execute(&g, d, &p, Mode::Distributed, None, false).unwrap();
        assert_eq!(out.record.spanner_size, 1);
        assert_eq!(out.record.max_stretch, Some(1));
        assert!(out.record.verification.passed);
        let row = csv_row(&out.record);
        assert_eq!(row.len(), CSV_HEADER.len());
        assert_eq!(row[6], "distributed");
    }

    #[test]
    fn timing_is_opt_in() {
        let g = generate::cycle(5);
        let p = Params::new(5, 1, 2, 4.0, 0).unwrap();
        let d = GraphDescriptor::from_file(&g, "x", &[]);
        let out = execute(&g, d.clone(), &p, Mode::Centralized, None, false).unwrap();
        let json = serde_json::to_string(&out.record).unwrap();
        assert!(!json.contains("wall_time_ms"));
        let out = execute(&g, d, &p, Mode::Centralized, None, true).unwrap();
        assert!(out.record.wall_time_ms.is_some());
    }
}
