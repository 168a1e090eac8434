//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use spansim_cli::record::{execute, GraphDescriptor, Mode, RunOutput};
use spansim_core::broadcast::{run_and_check, BroadcastInstance};
use spansim_core::generate::{self, generate, GraphModel};
use spansim_core::localsim::ROUND_CONSTANT;
use spansim_core::verify::{check_counts, message_bound, round_bound};
use spansim_core::{run_distributed_sampler, sampler, MultiGraph, Params};

const SEEDS: u64 = 10;
const C: f64 = 4.0;

struct Suite {
    results: Vec<(u32, bool)>,
}

impl Suite {
    fn report(&mut self, id: u32, pass: bool, detail: String) {
        println!(
            "criterion {id:>2}: {} | {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        self.results.push((id, pass));
    }
}

fn log2_ceil(n: usize) -> u32 {
    (n as f64).log2().ceil() as u32
}

fn params(n: usize, k: u32, seed: u64) -> Params {
    Params::new(n, k, log2_ceil(n), C, seed).unwrap()
}

fn descriptor(name: &str, g: &MultiGraph, seed: Option<u64>) -> GraphDescriptor {
    GraphDescriptor {
        model: name.to_string(),
        source: None,
        n: g.node_count(),
        m: g.edge_count(),
        seed,
    }
}

fn grid_graphs() -> Vec<(String, MultiGraph, Option<u64>)> {
    let gnp = |n, p| {
        let model = GraphModel::Gnp { n, p };
        (
            model.to_string(),
            generate(model, 0).unwrap().graph,
            Some(0),
        )
    };
    vec![
        gnp(256, 0.1),
        gnp(1024, 0.05),
        ("complete n=64".into(), generate::complete(64), None),
        ("grid rows=32 cols=32".into(), generate::grid(32, 32), None),
        ("path n=64".into(), generate::path(64), None),
        ("cycle n=64".into(), generate::cycle(64), None),
    ]
}

struct GridRun {
    label: String,
    g_index: usize,
    params: Params,
    out: RunOutput,
}

fn run_grid(graphs: &[(String, MultiGraph, Option<u64>)], mode: Mode) -> Vec<GridRun> {
    let mut runs = Vec::new();
    for (gi, (name, g, gseed)) in graphs.iter().enumerate() {
        for k in 1..=2 {
            for seed in 0..SEEDS {
                let p = params(g.node_count(), k, seed);
                let out = execute(g, descriptor(name, g, *gseed), &p, mode, None, false).unwrap();
                runs.push(GridRun {
                    label: format!("{name} k={k} seed={seed}"),
                    g_index: gi,
                    params: p,
                    out,
                });
            }
        }
    }
    runs
}

fn first_bad(runs: &[GridRun], bad: impl Fn(&GridRun) -> bool) -> Option<&str> {
    runs.iter().find(|r| bad(r)).map(|r| r.label.as_str())
}

fn criteria_1_to_3(s: &mut Suite, runs: &[GridRun], elapsed: Duration, mode: &str) -> bool {
    let stretch_viol: usize = runs
        .iter()
        .map(|r| r.out.report.stretch.violations.len())
        .sum();
    let failures: usize = runs.iter().map(|r| r.out.report.failures.len()).sum();
    let max_stretch = runs
        .iter()
        .filter_map(|r| r.out.report.stretch.max_stretch)
        .max();
    let below_e = runs
        .iter()
        .filter(|r| r.out.result.len() < r.out.record.graph.m)
        .count();
    let c1 = stretch_viol == 0 && failures == 0 && elapsed < Duration::from_secs(120);
    if mode == "centralized" {
        s.report(
            1,
            c1,
            format!(
                "{} runs, stretch violations {stretch_viol}, failures {failures}, max stretch {max_stretch:?}, \
                 runs with |S| < m: {below_e}, time {:.1}s (limit 120s)",
                runs.len(),
                elapsed.as_secs_f64()
            ),
        );
    }

    let diam_viol: usize = runs
        .iter()
        .map(|r| r.out.report.diameters.violations.len())
        .sum();
    let clusters: usize = runs
        .iter()
        .flat_map(|r| r.out.report.diameters.levels.iter().map(|l| l.clusters))
        .sum();
    let c2 = diam_viol == 0;
    let partition_bad = runs.iter().filter(|r| !r.out.report.partition.ok).count();
    let c3 = partition_bad == 0;
    if mode == "centralized" {
        s.report(
            2,
            c2,
            format!("{clusters} clusters checked, {diam_viol} violations"),
        );
        s.report(
            3,
            c3,
            format!("{} runs, {partition_bad} invalid partitions", runs.len()),
        );
    }
    c1 && c2 && c3
}

fn criterion_4(s: &mut Suite, runs: &[GridRun]) {
    let over_budget = first_bad(runs, |r| !r.out.report.counts.edges.within);
    let mut ratios = Vec::new();
    for n in [512, 1024, 2048] {
        let g = generate(GraphModel::Gnp { n, p: 0.2 }, 0).unwrap().graph;
        let nn = g.node_count();
        let mut sum = 0.0;
        for seed in 0..3 {
            let p = params(nn, 1, seed);
            let r = sampler(&g, &p).unwrap();
            sum += check_counts(&r.result, &p, None).edges.ratio;
        }
        ratios.push((nn, sum / 3.0));
    }
    let hi = ratios.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let lo = ratios.iter().map(|r| r.1).fold(f64::MAX, f64::min);
    let band = hi / lo;
    s.report(
        4,
        over_budget.is_none() && band < 10.0,
        format!(
            "budget bound exceeded: {}; |S|/(k h n^(4/3) log^3 n) on gnp p=0.2: {}; band {band:.2}x (limit 10x)",
            over_budget.unwrap_or("none"),
            ratios
                .iter()
                .map(|(n, r)| format!("n={n}: {r:.5}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
}

fn criterion_5(s: &mut Suite, runs: &[GridRun]) {
    let bad = first_bad(runs, |r| {
        r.out.record.counters.as_ref().unwrap().rounds_elapsed > round_bound(&r.params)
    });
    let worst = runs
        .iter()
        .map(|r| {
            let c = r.out.record.counters.as_ref().unwrap();
            c.rounds_elapsed as f64 / (3f64.powi(r.params.k as i32) * f64::from(r.params.h))
        })
        .fold(0.0, f64::max);
    s.report(
        5,
        bad.is_none(),
        format!(
            "C_r = {ROUND_CONSTANT}, largest rounds/(3^k h) = {worst:.2}, first violation: {}",
            bad.unwrap_or("none")
        ),
    );
}

fn criterion_6(s: &mut Suite, runs: &[GridRun]) {
    let bad = first_bad(runs, |r| {
        r.out.record.counters.as_ref().unwrap().total_messages as f64 > message_bound(&r.params)
    });
    let worst = runs
        .iter()
        .map(|r| {
            r.out.record.counters.as_ref().unwrap().total_messages as f64 / message_bound(&r.params)
        })
        .fold(0.0, f64::max);

    let mut trend = Vec::new();
    for n in [512, 1024, 2048] {
        let g = generate::complete(n);
        let log_n = (n as f64).log2();
        // c^2 log^3 n * scale = 4, so each trial draws min(4 n^(2^j delta + eps), |X_v|) samples
        let p = params(n, 1, 0)
            .with_budget_scale(4.0 / (C * C * log_n.powi(3)))
            .unwrap();
        let d = run_distributed_sampler(&g, &p).unwrap();
        trend.push((n, d.counters.total_messages as f64 / g.edge_count() as f64));
    }
    let decreasing = trend.windows(2).all(|w| w[1].1 < w[0].1);
    s.report(
        6,
        bad.is_none() && decreasing,
        format!(
            "largest messages/bound = {worst:.3}, first violation: {}; budget-scaled K_n messages/m: {}",
            bad.unwrap_or("none"),
            trend
                .iter()
                .map(|(n, r)| format!("n={n}: {r:.3}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
}

fn criterion_7(s: &mut Suite) {
    let g = generate(GraphModel::Gnp { n: 2048, p: 0.2 }, 0)
        .unwrap()
        .graph;
    let n = g.node_count();
    let mut within = 0;
    let mut soft = 0;
    let mut soft_total = 0;
    let mut range = (0.0, 0.0);
    for seed in 0..20 {
        let p = params(n, 2, seed);
        let r = sampler(&g, &p).unwrap();
        let counts = check_counts(&r.result, &p, None);
        let first = &counts.nodes[0];
        range = (first.lower, first.upper);
        if first.within {
            within += 1;
        }
        for c in &counts.nodes[1..] {
            soft_total += 1;
            if c.within {
                soft += 1;
            }
        }
    }
    s.report(
        7,
        within >= 19,
        format!(
            "n_1 in [{:.1}, {:.1}] in {within}/20 runs (need 19); deeper levels (soft) within bounds {soft}/{soft_total}",
            range.0, range.1
        ),
    );
}

fn criterion_8(s: &mut Suite) {
    let g = generate(GraphModel::Gnp { n: 512, p: 0.1 }, 0)
        .unwrap()
        .graph;
    let n = g.node_count();
    let mut misses = 0;
    let mut wrong_rounds = 0;
    let mut runs = 0;
    let mut spanner_frac = 0.0;
    for seed in 0..5 {
        let p = params(n, 1, seed);
        let r = sampler(&g, &p).unwrap();
        spanner_frac += r.result.len() as f64 / g.edge_count() as f64 / 5.0;
        for t in 1..=3 {
            let inst = BroadcastInstance::new(n, t, &r.result).with_alpha(5);
            let rep = run_and_check(&g, &inst);
            misses += rep.misses.len();
            if rep.rounds != 5 * u64::from(t) {
                wrong_rounds += 1;
            }
            runs += 1;
        }
    }
    s.report(
        8,
        misses == 0 && wrong_rounds == 0,
        format!("{runs} broadcasts, misses {misses}, rounds != 5t in {wrong_rounds}; mean |S|/m = {spanner_frac:.3}"),
    );
}

fn criterion_9(s: &mut Suite, graphs: &[(String, MultiGraph, Option<u64>)], runs: &[&GridRun]) {
    let mut differing = Vec::new();
    for r in runs {
        let (name, g, gseed) = &graphs[r.g_index];
        let again = execute(
            g,
            descriptor(name, g, *gseed),
            &r.params,
            r.out.record.mode,
            None,
            false,
        )
        .unwrap();
        let a = serde_json::to_vec(&r.out.record).unwrap();
        let b = serde_json::to_vec(&again.record).unwrap();
        if a != b || r.out.result != again.result {
            differing.push(r.label.clone());
        }
    }
    s.report(
        9,
        differing.is_empty(),
        format!(
            "{} runs repeated, {} differ {:?}",
            runs.len(),
            differing.len(),
            differing
        ),
    );
}

fn criterion_10(s: &mut Suite, central: &[GridRun], distributed: &[GridRun], dist_ok: bool) {
    let same = central
        .iter()
        .zip(distributed)
        .filter(|(c, d)| c.out.result.spanner_edges == d.out.result.spanner_edges)
        .count();
    let failing = distributed
        .iter()
        .filter(|r| {
            let rep = &r.out.report;
            !rep.stretch.violations.is_empty()
                || !rep.diameters.violations.is_empty()
                || !rep.partition.ok
                || !rep.failures.is_empty()
        })
        .count();
    s.report(
        10,
        dist_ok && failing == 0,
        format!(
            "distributed runs failing criteria 1-3: {failing}/{}; identical S in {same}/{} pairs",
            distributed.len(),
            central.len()
        ),
    );
}

/// Not a criterion: the same grid with budgets scaled down so spanners are
/// strictly sparser than the graph, to show the checks on non-trivial output.
fn scaled_info(graphs: &[(String, MultiGraph, Option<u64>)]) {
    let mut runs = 0;
    let mut stretch_viol = 0;
    let mut failures = 0;
    let mut diam = 0;
    let mut frac = 0.0;
    for (_, g, _) in graphs {
        let n = g.node_count();
        let log_n = (n as f64).log2();
        for k in 1..=2 {
            for seed in 0..3 {
                let p = params(n, k, seed)
                    .with_budget_scale(4.0 / (C * C * log_n.powi(3)))
                    .unwrap();
                let out = execute(
                    g,
                    descriptor("", g, None),
                    &p,
                    Mode::Centralized,
                    None,
                    false,
                )
                .unwrap();
                runs += 1;
                stretch_viol += out.report.stretch.violations.len();
                failures += out.report.failures.len();
                diam += out.report.diameters.violations.len();
                frac += out.result.len() as f64 / g.edge_count() as f64;
            }
        }
    }
    println!(
        "info        : budget-scaled grid, {runs} runs: mean |S|/m {:.3}, stretch violations {stretch_viol}, \
         diameter violations {diam}, classification failures {failures}",
        frac / runs as f64
    );
}

fn main() {
    // `cargo test` passes harness flags such as --nocapture; a name filter skips the suite
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    let start = Instant::now();
    let mut s = Suite {
        results: Vec::new(),
    };
    let graphs = grid_graphs();

    let t = Instant::now();
    let central = run_grid(&graphs, Mode::Centralized);
    let central_time = t.elapsed();
    criteria_1_to_3(&mut s, &central, central_time, "centralized");
    criterion_4(&mut s, &central);

    let distributed = run_grid(&graphs, Mode::Distributed);
    let dist_ok = criteria_1_to_3(&mut s, &distributed, Duration::ZERO, "distributed");
    criterion_5(&mut s, &distributed);
    criterion_6(&mut s, &distributed);
    criterion_7(&mut s);
    criterion_8(&mut s);
    let all: Vec<&GridRun> = central.iter().chain(&distributed).collect();
    criterion_9(&mut s, &graphs, &all);
    criterion_10(&mut s, &central, &distributed, dist_ok);
    scaled_info(&graphs);

    let failed: Vec<u32> = s.results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        s.results.len() - failed.len(),
        s.results.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
