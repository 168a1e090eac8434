//! Exact oracles for the guarantees of a sampler run.
//!
//! Stretch and cluster diameters are measured by BFS; the partition by a
//! direct membership count; sizes, node counts, messages and rounds are
//! compared against closed-form bounds with pinned constants.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{bfs_distances, EdgeId, MultiGraph, NodeId};
use crate::localsim::{Counters, MESSAGE_CONSTANT, ROUND_CONSTANT, TREE_MESSAGE_CONSTANT};
use crate::sampler::{
    derive_budgets, ClassificationFailure, ClusterAssignment, Params, SpannerResult,
};

/// A G-edge whose endpoints are farther apart in `H` than allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StretchViolation {
    pub edge: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    /// `dist_H(u, v)`, `None` if disconnected in `H`.
    pub distance: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StretchCheck {
    pub bound: u64,
    /// Largest `dist_H(u, v)` over G-edges; `None` if some G-edge is disconnected in `H`.
    pub max_stretch: Option<usize>,
    pub violations: Vec<StretchViolation>,
}

/// BFS from `source` in `h` until every node in `targets` is reached.
struct Bfs {
    dist: Vec<usize>,
    stamp: Vec<u32>,
    round: u32,
    queue: VecDeque<NodeId>,
}

impl Bfs {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![0; n],
            stamp: vec![0; n],
            round: 0,
            queue: VecDeque::new(),
        }
    }

    fn get(&self, x: NodeId) -> Option<usize> {
        (self.stamp[x] == self.round).then_some(self.dist[x])
    }

    fn run(&mut self, h: &MultiGraph, source: NodeId, targets: &[NodeId]) {
        self.round += 1;
        self.queue.clear();
        self.stamp[source] = self.round;
        self.dist[source] = 0;
        self.queue.push_back(source);
        let mut missing = targets.iter().filter(|&&t| t != source).count();
        while let Some(x) = self.queue.pop_front() {
            if missing == 0 {
                break;
            }
            for &(y, _) in h.incident(x) {
                if self.stamp[y] != self.round {
                    self.stamp[y] = self.round;
                    self.dist[y] = self.dist[x] + 1;
                    self.queue.push_back(y);
                    if targets.binary_search(&y).is_ok() {
                        missing -= 1;
                    }
                }
            }
        }
    }
}

/// Checks `dist_H(u, v) <= bound` for every edge `(u, v)` of `g`, where
/// `H = (V, spanner_edges)`. Parallel edges are reported by lowest ID.
pub fn check_stretch(g: &MultiGraph, spanner_edges: &[EdgeId], bound: u64) -> StretchCheck {
    let h = g.edge_subgraph(spanner_edges);
    let mut bfs = Bfs::new(g.node_count());
    let mut max_stretch = Some(0);
    let mut violations = Vec::new();
    for u in g.nodes() {
        let targets: Vec<NodeId> = g.neighbors(u).filter(|&v| v > u).collect();
        if targets.is_empty() {
            continue;
        }
        bfs.run(&h, u, &targets);
        for &v in &targets {
            let d = bfs.get(v);
            max_stretch = match (max_stretch, d) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            if d.is_none_or(|d| d as u64 > bound) {
                violations.push(StretchViolation {
                    edge: g.edges_between(u, v)[0].1,
                    u,
                    v,
                    distance: d,
                });
            }
        }
    }
    violations.sort_by_key(|v| v.edge);
    StretchCheck {
        bound,
        max_stretch,
        violations,
    }
}

/// A pair with `dist_H > bound * dist_G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairViolation {
    pub u: NodeId,
    pub v: NodeId,
    pub dist_g: usize,
    pub dist_h: Option<usize>,
}

/// All-pairs form of the stretch check: `dist_H(u, v) <= bound * dist_G(u, v)`
/// for every connected pair. Quadratic; meant for small graphs.
pub fn check_stretch_all_pairs(
    g: &MultiGraph,
    spanner_edges: &[EdgeId],
    bound: u64,
) -> Vec<PairViolation> {
    let h = g.edge_subgraph(spanner_edges);
    let mut out = Vec::new();
    for u in g.nodes() {
        let dg = bfs_distances(g, u);
        let dh = bfs_distances(&h, u);
        for v in (u + 1)..g.node_count() {
            let Some(d) = dg[v] else { continue };
            if dh[v].is_none_or(|x| x as u64 > bound * d as u64) {
                out.push(PairViolation {
                    u,
                    v,
                    dist_g: d,
                    dist_h: dh[v],
                });
            }
        }
    }
    out
}

/// A cluster whose induced spanner subgraph is disconnected or too wide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterDiameter {
    pub level: usize,
    pub cluster: NodeId,
    pub size: usize,
    /// `None` if `Ind_H(C_j(v))` is disconnected.
    pub diameter: Option<usize>,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDiameter {
    pub level: usize,
    pub clusters: usize,
    pub max_diameter: Option<usize>,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DiameterCheck {
    pub levels: Vec<LevelDiameter>,
    pub violations: Vec<ClusterDiameter>,
}

/// Measures the diameter of `Ind_H(C_j(v))` for every cluster of every
/// level against `3^j - 1`.
pub fn check_cluster_diameters(
    g: &MultiGraph,
    spanner_edges: &[EdgeId],
    assignment: &ClusterAssignment,
) -> DiameterCheck {
    let h = g.edge_subgraph(spanner_edges);
    let mut out = DiameterCheck::default();
    for lc in &assignment.levels {
        let bound = 3u64.pow(lc.level as u32) - 1;
        let mut level_max = Some(0);
        for (v, members) in lc.members.iter().enumerate() {
            let diameter = cluster_diameter(&h, members);
            level_max = match (level_max, diameter) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            if diameter.is_none_or(|d| d as u64 > bound) {
                out.violations.push(ClusterDiameter {
                    level: lc.level,
                    cluster: v,
                    size: members.len(),
                    diameter,
                    bound,
                });
            }
        }
        out.levels.push(LevelDiameter {
            level: lc.level,
            clusters: lc.members.len(),
            max_diameter: level_max,
            bound,
        });
    }
    out
}

fn cluster_diameter(h: &MultiGraph, members: &[NodeId]) -> Option<usize> {
    if members.len() <= 1 {
        return Some(0);
    }
    let (sub, _) = h.induced_subgraph(members).expect("cluster is non-empty");
    let mut best = 0;
    for s in sub.nodes() {
        for d in bfs_distances(&sub, s) {
            best = best.max(d?);
        }
    }
    Some(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub ok: bool,
    /// Nodes in no final cluster or in more than one.
    pub offenders: Vec<NodeId>,
}

/// Checks that the final clusters `C(v)`, `v` in `V'`, partition `0..n`.
pub fn check_partition(assignment: &ClusterAssignment, n: usize) -> PartitionCheck {
    let mut count = vec![0usize; n];
    let mut offenders = Vec::new();
    for (_, _, members) in assignment.final_clusters() {
        for &x in members {
            match count.get_mut(x) {
                Some(c) => *c += 1,
                None => offenders.push(x),
            }
        }
    }
    offenders.extend((0..n).filter(|&x| count[x] != 1));
    offenders.sort_unstable();
    offenders.dedup();
    PartitionCheck {
        ok: offenders.is_empty(),
        offenders,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCountCheck {
    pub size: usize,
    /// `2h * sum_j n_j * samples_per_trial(j)`: no run can exceed it.
    pub budget_bound: f64,
    /// `k * h * n^(1 + delta) * log^3 n`.
    pub formula: f64,
    /// `size / formula`.
    pub ratio: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeCountCheck {
    pub level: usize,
    pub nodes: usize,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    /// Soft checks are informational and never fail a report.
    pub hard: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub measured: u64,
    pub bound: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountCheck {
    pub edges: EdgeCountCheck,
    pub nodes: Vec<NodeCountCheck>,
    pub messages: Option<BoundCheck>,
    pub rounds: Option<BoundCheck>,
}

impl CountCheck {
    pub fn passed(&self) -> bool {
        self.edges.within
            && self.nodes.iter().all(|c| c.within || !c.hard)
            && self.messages.as_ref().is_none_or(|c| c.within)
            && self.rounds.as_ref().is_none_or(|c| c.within)
    }
}

/// `C_m * k * h * n^(1 + delta + eps) * log^3 n + C_t * k * n`.
pub fn message_bound(p: &Params) -> f64 {
    let n = p.n as f64;
    let k = f64::from(p.k);
    let sampling = k * f64::from(p.h) * n.powf(1.0 + p.delta() + p.epsilon()) * p.log_n().powi(3);
    MESSAGE_CONSTANT * sampling + TREE_MESSAGE_CONSTANT * k * n
}

/// `C_r * 3^k * h`.
pub fn round_bound(p: &Params) -> u64 {
    ROUND_CONSTANT * 3u64.pow(p.k) * u64::from(p.h)
}

/// Size, level node counts and, when given, message and round counters
/// against their bounds. Node counts are hard checks only where
/// `n * p̂_{j-1} >= 16 log n`.
pub fn check_counts(result: &SpannerResult, p: &Params, counters: Option<&Counters>) -> CountCheck {
    let n = p.n as f64;
    let log_n = p.log_n();
    let budget_bound: f64 = result
        .level_nodes
        .iter()
        .enumerate()
        .map(|(j, &nj)| {
            let b = derive_budgets(p, j);
            2.0 * f64::from(p.h) * nj as f64 * b.samples_per_trial as f64
        })
        .sum();
    let formula = f64::from(p.k) * f64::from(p.h) * n.powf(1.0 + p.delta()) * log_n.powi(3);
    let size = result.len();
    let edges = EdgeCountCheck {
        size,
        budget_bound,
        formula,
        ratio: if formula > 0.0 {
            size as f64 / formula
        } else {
            0.0
        },
        within: size as f64 <= budget_bound,
    };

    let nodes = result
        .level_nodes
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &nj)| {
            let expected = n * p.cumulative_center_prob(j - 1);
            let (lower, upper) = (expected / 2.0, 1.5 * expected);
            NodeCountCheck {
                level: j,
                nodes: nj,
                lower,
                upper,
                within: lower <= nj as f64 && nj as f64 <= upper,
                hard: expected >= 16.0 * log_n,
            }
        })
        .collect();

    let messages = counters.map(|c| {
        let bound = message_bound(p);
        BoundCheck {
            measured: c.total_messages,
            bound,
            within: c.total_messages as f64 <= bound,
        }
    });
    let rounds = counters.map(|c| {
        let bound = round_bound(p);
        BoundCheck {
            measured: c.rounds_elapsed,
            bound: bound as f64,
            within: c.rounds_elapsed <= bound,
        }
    });
    CountCheck {
        edges,
        nodes,
        messages,
        rounds,
    }
}

/// Fraction of heavy nodes at levels `j < k` that were clustered.
pub fn heavy_clustered_fraction(result: &SpannerResult) -> Option<f64> {
    let last = result.levels.len().saturating_sub(1);
    let (heavy, unclustered) = result.levels[..last]
        .iter()
        .fold((0, 0), |(h, u), l| (h + l.heavy, u + l.heavy_unclustered));
    (heavy > 0).then(|| 1.0 - unclustered as f64 / heavy as f64)
}

/// Every check of one run. Passes iff every violation list is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub stretch: StretchCheck,
    pub diameters: DiameterCheck,
    pub partition: PartitionCheck,
    pub counts: CountCheck,
    pub failures: Vec<ClassificationFailure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.stretch.violations.is_empty()
            && self.diameters.violations.is_empty()
            && self.partition.ok
            && self.counts.passed()
            && self.failures.is_empty()
    }

    /// Number of individual violations across all checks.
    pub fn violation_count(&self) -> usize {
        let counts = &self.counts;
        self.stretch.violations.len()
            + self.diameters.violations.len()
            + self.partition.offenders.len()
            + usize::from(!counts.edges.within)
            + counts.nodes.iter().filter(|c| c.hard && !c.within).count()
            + usize::from(counts.messages.as_ref().is_some_and(|c| !c.within))
            + usize::from(counts.rounds.as_ref().is_some_and(|c| !c.within))
    }
}

/// Runs every check on the output of a sampler run over `g`.
pub fn verify_run(
    g: &MultiGraph,
    p: &Params,
    result: &SpannerResult,
    assignment: &ClusterAssignment,
    counters: Option<&Counters>,
) -> VerificationReport {
    VerificationReport {
        stretch: check_stretch(g, &result.spanner_edges, result.stretch_bound),
        diameters: check_cluster_diameters(g, &result.spanner_edges, assignment),
        partition: check_partition(assignment, g.node_count()),
        counts: check_counts(result, p, counters),
        failures: result.failures.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::sampler::sampler;

    fn all_ids(g: &MultiGraph) -> Vec<EdgeId> {
        g.edges().iter().map(|e| e.id).collect()
    }

    #[test]
    fn identity_spanner() {
        let g = generate::gnp(30, 0.3, 1);
        let c = check_stretch(&g, &all_ids(&g), 1);
        assert!(c.violations.is_empty());
        assert_eq!(c.max_stretch, Some(1));
    }

    #[test]
    fn triangle_minus_edge() {
        let g = generate::complete(3);
        // edges 0:(0,1) 1:(0,2) 2:(1,2); drop (1,2)
        assert!(check_stretch(&g, &[0, 1], 2).violations.is_empty());
        let c = check_stretch(&g, &[0, 1], 1);
        assert_eq!(c.violations.len(), 1);
        assert_eq!(c.violations[0].distance, Some(2));
    }

    #[test]
    fn broken_cycle() {
        let g = generate::cycle(8);
        let kept: Vec<EdgeId> = (1..8).collect();
        assert!(check_stretch(&g, &kept, 7).violations.is_empty());
        let c = check_stretch(&g, &kept, 6);
        assert_eq!(c.violations.len(), 1);
        assert_eq!(c.violations[0].distance, Some(7));
        assert_eq!(c.max_stretch, Some(7));
    }

    #[test]
    fn disconnected_spanner() {
        let g = generate::path(3);
        let c = check_stretch(&g, &[0], 5);
        assert_eq!(c.max_stretch, None);
        assert_eq!(c.violations[0].distance, None);
    }

    #[test]
    fn all_pairs_agrees_on_cycle() {
        let g = generate::cycle(8);
        let kept: Vec<EdgeId> = (1..8).collect();
        assert!(check_stretch_all_pairs(&g, &kept, 7).is_empty());
        assert!(!check_stretch_all_pairs(&g, &kept, 6).is_empty());
    }

    #[test]
    fn partition_and_diameter_on_runs() {
        let g = generate::gnp(200, 0.1, 5);
        for seed in 0..3 {
            let p = Params::new(g.node_count(), 2, 4, 2.0, seed)
                .unwrap()
                .with_budget_scale(0.01)
                .unwrap();
            let r = sampler(&g, &p).unwrap();
            assert!(check_partition(&r.assignment, g.node_count()).ok);
            let d = check_cluster_diameters(&g, &r.result.spanner_edges, &r.assignment);
            assert!(d.violations.is_empty(), "{:?}", d.violations);
            assert_eq!(d.levels[0].max_diameter, Some(0));
        }
    }

    #[test]
    fn forced_singletons_partition() {
        let g = generate::cycle(12);
        let p = Params::new(12, 2, 2, 1.0, 0)
            .unwrap()
            .with_center_prob(0.0)
            .unwrap();
        let r = sampler(&g, &p).unwrap();
        let c = check_partition(&r.assignment, 12);
        assert!(c.ok);
        assert_eq!(r.assignment.final_clusters().len(), 12);
    }

    #[test]
    fn partition_detects_gaps() {
        let g = MultiGraph::empty(1);
        let r = sampler(&g, &Params::new(1, 1, 1, 1.0, 0).unwrap()).unwrap();
        assert!(check_partition(&r.assignment, 1).ok);
        let c = check_partition(&r.assignment, 2);
        assert_eq!(c.offenders, vec![1]);
    }

    #[test]
    fn star_cluster_diameter() {
        let g = generate::star(6);
        let a = ClusterAssignment {
            n: 6,
            levels: vec![crate::sampler::LevelClusters {
                level: 1,
                members: vec![(0..6).collect()],
                trees: vec![crate::localsim::ClusterTree::singleton(0)],
                centers: vec![],
                next: vec![None],
            }],
            retired_at: vec![1; 6],
        };
        let d = check_cluster_diameters(&g, &all_ids(&g), &a);
        assert_eq!(d.levels[0].max_diameter, Some(2));
        assert!(d.violations.is_empty());
        let d = check_cluster_diameters(&g, &[0, 1], &a);
        assert_eq!(d.violations[0].diameter, None);
    }

    #[test]
    fn counts_on_a_run() {
        let g = generate::complete(64);
        let p = Params::new(64, 1, 6, 4.0, 7).unwrap();
        let r = sampler(&g, &p).unwrap();
        let c = check_counts(&r.result, &p, None);
        assert!(c.edges.within);
        assert!(c.messages.is_none());
        assert_eq!(c.nodes.len(), 1);
        let report = verify_run(&g, &p, &r.result, &r.assignment, None);
        assert!(report.passed());
        assert_eq!(report.violation_count(), 0);
    }
}
