//! Centralized spanner construction by iterative edge sampling and clustering.
//!
//! Level `j = 0..=k` runs on the level graph `G_j`. Every node first samples
//! its incident edges for up to `2h` trials to discover neighbors, adding one
//! edge per discovered neighbor to the spanner. Then (for `j < k`) nodes are
//! marked as centers at random, every other node merges into a center it
//! discovered, and the clusters are contracted into `G_{j+1}`. The union of
//! all accepted edges is a `(2 * 3^k - 1)`-spanner with high probability.

mod level;
mod params;
mod trial;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use level::{
    advance, choose, mark_centers, Choice, ClusterAssignment, Level, LevelClusters, LevelStats,
};
pub use params::{derive_budgets, LevelBudgets, ParamError, Params, MAX_LEVELS};
pub use trial::{Classification, NeighborHits, NodeTrials};

use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::rng::{self, Purpose};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("params are for {params} nodes but the graph has {graph}")]
    NodeCountMismatch { params: usize, graph: usize },
}

/// A node that ended its trials neither light nor heavy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationFailure {
    pub level: usize,
    /// Virtual node of the level graph.
    pub node: NodeId,
    /// Original node hosting it.
    pub host: NodeId,
    pub queried: usize,
    pub unexplored_edges: usize,
    pub threshold: u64,
}

/// Output edge set and per-level accounting of a sampler run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpannerResult {
    /// `S`, sorted original edge IDs.
    pub spanner_edges: Vec<EdgeId>,
    /// `F` of each level, sorted original edge IDs.
    pub level_edges: Vec<Vec<EdgeId>>,
    pub stretch_bound: u64,
    /// `n_j` for `j = 0..=k`.
    pub level_nodes: Vec<usize>,
    /// `m_j` for `j = 0..=k`.
    pub level_edge_counts: Vec<usize>,
    pub levels: Vec<LevelStats>,
    pub failures: Vec<ClassificationFailure>,
}

impl SpannerResult {
    pub fn len(&self) -> usize {
        self.spanner_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spanner_edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.spanner_edges.binary_search(&e).is_ok()
    }

    /// `H = (V, S)` as a graph over the original node set.
    pub fn subgraph(&self, g: &MultiGraph) -> MultiGraph {
        g.edge_subgraph(&self.spanner_edges)
    }
}

#[derive(Debug, Clone)]
pub struct SamplerRun {
    pub result: SpannerResult,
    pub assignment: ClusterAssignment,
}

pub(crate) fn check_params(g: &MultiGraph, p: &Params) -> Result<(), SamplerError> {
    if p.n != g.node_count() {
        return Err(SamplerError::NodeCountMismatch {
            params: p.n,
            graph: g.node_count(),
        });
    }
    Ok(())
}

/// Runs all trials of virtual node `v` at `level`.
pub fn run_node_trials(
    level: &Level,
    v: NodeId,
    params: &Params,
    budgets: &LevelBudgets,
) -> NodeTrials {
    let mut t = NodeTrials::for_node(&level.graph, v);
    let host = level.host(v);
    while t.wants_trial(budgets) {
        let mut r = rng::stream(
            params.seed,
            level.index,
            host,
            Purpose::Trial(t.trials_run() + 1),
        );
        t.run_trial(&level.graph, v, budgets, &mut r);
    }
    t
}

/// Accumulates per-level output shared by the centralized and distributed runs.
#[derive(Debug, Default)]
pub(crate) struct RunBuilder {
    spanner: Vec<EdgeId>,
    level_edges: Vec<Vec<EdgeId>>,
    level_nodes: Vec<usize>,
    level_edge_counts: Vec<usize>,
    stats: Vec<LevelStats>,
    failures: Vec<ClassificationFailure>,
    clusters: Vec<LevelClusters>,
}

impl RunBuilder {
    /// Records level `level`'s trial outcomes and returns their classes.
    pub(crate) fn record_trials(
        &mut self,
        level: &Level,
        budgets: &LevelBudgets,
        trials: &[NodeTrials],
    ) -> (LevelStats, Vec<Classification>) {
        let mut stats = LevelStats::new(level, budgets);
        let mut classes = Vec::with_capacity(trials.len());
        let mut f: Vec<EdgeId> = Vec::new();
        for (v, t) in trials.iter().enumerate() {
            let class = t.classify(budgets);
            stats.record_class(class, t.trials_run());
            if class == Classification::Failure {
                let failure = ClassificationFailure {
                    level: level.index,
                    node: v,
                    host: level.host(v),
                    queried: t.queried_count(),
                    unexplored_edges: t.unexplored().len(),
                    threshold: budgets.neighbor_threshold,
                };
                warn!("classification failure: {failure:?}");
                self.failures.push(failure);
            }
            f.extend(t.accepted().iter().map(|&(e, _)| e));
            classes.push(class);
        }
        f.sort_unstable();
        f.dedup();
        stats.accepted_edges = f.len();
        self.spanner.extend_from_slice(&f);
        self.level_edges.push(f);
        self.level_nodes.push(level.node_count());
        self.level_edge_counts.push(level.graph.edge_count());
        (stats, classes)
    }

    pub(crate) fn record_level(
        &mut self,
        level: &Level,
        mut stats: LevelStats,
        classes: &[Classification],
        choices: &[Choice],
        next: Vec<Option<NodeId>>,
    ) {
        stats.record_choices(choices, classes);
        self.stats.push(stats);
        let centers = choices
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Choice::Center)
            .map(|(v, _)| v)
            .collect();
        self.clusters.push(LevelClusters {
            level: level.index,
            members: level.members.clone(),
            trees: level.trees.clone(),
            centers,
            next,
        });
    }

    pub(crate) fn finish(mut self, params: &Params) -> SamplerRun {
        self.spanner.sort_unstable();
        self.spanner.dedup();
        let mut retired_at = vec![0; params.n];
        for lc in &self.clusters {
            for (v, next) in lc.next.iter().enumerate() {
                if next.is_none() {
                    for &x in &lc.members[v] {
                        retired_at[x] = lc.level;
                    }
                }
            }
        }
        SamplerRun {
            result: SpannerResult {
                spanner_edges: self.spanner,
                level_edges: self.level_edges,
                stretch_bound: params.stretch_bound(),
                level_nodes: self.level_nodes,
                level_edge_counts: self.level_edge_counts,
                levels: self.stats,
                failures: self.failures,
            },
            assignment: ClusterAssignment {
                n: params.n,
                levels: self.clusters,
                retired_at,
            },
        }
    }
}

/// Builds a spanner of `g`. Classification failures are recorded in the
/// result, never raised.
pub fn sampler(g: &MultiGraph, params: &Params) -> Result<SamplerRun, SamplerError> {
    check_params(g, params)?;
    let k = params.k as usize;
    let mut out = RunBuilder::default();
    let mut level = Level::initial(g);
    for j in 0..=k {
        let budgets = derive_budgets(params, j);
        let trials: Vec<NodeTrials> = (0..level.node_count())
            .map(|v| run_node_trials(&level, v, params, &budgets))
            .collect();
        let (stats, classes) = out.record_trials(&level, &budgets, &trials);
        if j < k {
            let is_center = mark_centers(&level, params, &budgets);
            let choices: Vec<Choice> = (0..level.node_count())
                .map(|v| choose(&trials[v], &is_center, v))
                .collect();
            let (next_level, next) = advance(&level, g, &choices);
            out.record_level(&level, stats, &classes, &choices, next);
            level = next_level;
        } else {
            let choices = vec![Choice::Unclustered; level.node_count()];
            out.record_level(
                &level,
                stats,
                &classes,
                &choices,
                vec![None; level.node_count()],
            );
        }
    }
    Ok(out.finish(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn run(g: &MultiGraph, k: u32, h: u32, c: f64, seed: u64) -> SamplerRun {
        sampler(g, &Params::new(g.node_count(), k, h, c, seed).unwrap()).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = generate::path(2);
        let r = run(&g, 1, 1, 1.0, 0);
        assert_eq!(r.result.spanner_edges, vec![0]);
        assert_eq!(r.result.stretch_bound, 5);
    }

    #[test]
    fn trees_keep_every_edge() {
        for g in [generate::path(32), generate::star(20), generate::grid(1, 9)] {
            let r = run(&g, 2, 3, 2.0, 9);
            assert_eq!(r.result.len(), g.edge_count());
        }
    }

    #[test]
    fn forced_centers_give_identity_clustering() {
        let g = generate::cycle(10);
        let p = Params::new(10, 1, 2, 1.0, 3)
            .unwrap()
            .with_center_prob(1.0)
            .unwrap();
        let r = sampler(&g, &p).unwrap();
        assert_eq!(r.result.level_nodes, vec![10, 10]);
        assert_eq!(r.result.level_edge_counts, vec![10, 10]);
        assert_eq!(r.assignment.levels[0].centers.len(), 10);
    }

    #[test]
    fn no_centers_leaves_everything_unclustered() {
        let g = generate::complete(8);
        let p = Params::new(8, 2, 2, 1.0, 3)
            .unwrap()
            .with_center_prob(0.0)
            .unwrap();
        let r = sampler(&g, &p).unwrap();
        assert_eq!(r.result.level_nodes, vec![8, 0, 0]);
        assert_eq!(r.result.level_edges[0].len(), r.result.len());
        assert!(r.assignment.retired_at.iter().all(|&l| l == 0));
    }

    #[test]
    fn single_node_graph() {
        let g = MultiGraph::empty(1);
        let r = run(&g, 1, 1, 1.0, 0);
        assert!(r.result.is_empty());
        assert_eq!(r.assignment.final_clusters().len(), 1);
    }

    #[test]
    fn mismatched_params() {
        let g = generate::path(3);
        let p = Params::new(4, 1, 1, 1.0, 0).unwrap();
        assert!(matches!(
            sampler(&g, &p),
            Err(SamplerError::NodeCountMismatch {
                params: 4,
                graph: 3
            })
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let g = generate::gnp(120, 0.2, 4);
        let p = Params::new(120, 2, 3, 1.0, 11)
            .unwrap()
            .with_budget_scale(0.002)
            .unwrap();
        let a = sampler(&g, &p).unwrap();
        let b = sampler(&g, &p).unwrap();
        assert_eq!(a.result, b.result);
        assert_eq!(a.assignment, b.assignment);
        let c = sampler(&g, &p.clone().with_seed(12)).unwrap();
        assert_ne!(a.result.spanner_edges, c.result.spanner_edges);
    }

    #[test]
    fn star_clusters_around_hub() {
        // find a seed whose center marks pick the hub and no leaf
        let g = generate::star(9);
        let p = Params::new(9, 1, 2, 1.0, 0).unwrap();
        let seed = (0..5000)
            .find(|&s| {
                let p = p.clone().with_seed(s);
                let lvl = Level::initial(&g);
                let marks = mark_centers(&lvl, &p, &derive_budgets(&p, 0));
                marks[0] && marks[1..].iter().all(|m| !m)
            })
            .expect("some seed marks only the hub");
        let r = sampler(&g, &p.with_seed(seed)).unwrap();
        assert_eq!(
            r.assignment.levels[1].members,
            vec![(0..9).collect::<Vec<_>>()]
        );
    }
}
