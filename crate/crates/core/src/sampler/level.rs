//! Level graphs, the clustering (second) step, and contraction to the next level.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::{LevelBudgets, Params};
use super::trial::{Classification, NodeTrials};
use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::localsim::ClusterTree;
use crate::rng::{self, Purpose};

/// The level graph `G_j` together with its embedding into the original graph.
///
/// Virtual node `v` stands for the original nodes `members[v]`, spanned by
/// `trees[v]` whose root hosts `v`.
#[derive(Debug, Clone)]
pub struct Level {
    pub index: usize,
    pub graph: MultiGraph,
    pub members: Vec<Vec<NodeId>>,
    pub trees: Vec<ClusterTree>,
    /// original node → virtual node containing it
    pub owner: Vec<Option<NodeId>>,
}

impl Level {
    pub fn initial(g: &MultiGraph) -> Self {
        let n = g.node_count();
        Self {
            index: 0,
            graph: g.clone(),
            members: (0..n).map(|v| vec![v]).collect(),
            trees: (0..n).map(ClusterTree::singleton).collect(),
            owner: (0..n).map(Some).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Original node hosting virtual node `v`.
    pub fn host(&self, v: NodeId) -> NodeId {
        self.trees[v].root()
    }
}

/// Second-step decision of one virtual node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Choice {
    Center,
    /// Merge into `center` through accepted edge `edge`.
    Join {
        center: NodeId,
        edge: EdgeId,
    },
    Unclustered,
}

/// Marks centers independently with probability `budgets.center_prob`.
pub fn mark_centers(level: &Level, params: &Params, budgets: &LevelBudgets) -> Vec<bool> {
    (0..level.node_count())
        .map(|v| {
            let mut r = rng::stream(params.seed, level.index, level.host(v), Purpose::Center);
            r.random::<f64>() < budgets.center_prob
        })
        .collect()
}

/// A non-center joins the lowest-index center among its queried neighbors.
pub fn choose(trials: &NodeTrials, is_center: &[bool], v: NodeId) -> Choice {
    if is_center[v] {
        return Choice::Center;
    }
    trials
        .accepted()
        .iter()
        .filter(|&&(_, u)| is_center[u])
        .min_by_key(|&&(_, u)| u)
        .map_or(Choice::Unclustered, |&(edge, center)| Choice::Join {
            center,
            edge,
        })
}

/// Clusters of one level, as recorded in a [`ClusterAssignment`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelClusters {
    pub level: usize,
    /// `C_j(v)` for every `v` in `V_j`, each sorted.
    pub members: Vec<Vec<NodeId>>,
    /// `T_j(v)` for every `v` in `V_j`.
    pub trees: Vec<ClusterTree>,
    /// Virtual nodes marked as centers (empty on the last level).
    pub centers: Vec<NodeId>,
    /// `V_j → V_{j+1}`; `None` for unclustered nodes (all of them on the last level).
    pub next: Vec<Option<NodeId>>,
}

/// Hierarchical clustering produced by a sampler run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub n: usize,
    pub levels: Vec<LevelClusters>,
    /// `r(v)`: the level at which the cluster containing original node `v` became unclustered.
    pub retired_at: Vec<usize>,
}

impl ClusterAssignment {
    /// Virtual node of level `j` containing original node `x`, if any.
    pub fn cluster_of(&self, j: usize, x: NodeId) -> Option<NodeId> {
        self.levels[j]
            .members
            .iter()
            .position(|m| m.binary_search(&x).is_ok())
    }

    /// The final clusters `C(v)` for `v` in `V'` as `(level, virtual node, members)`.
    pub fn final_clusters(&self) -> Vec<(usize, NodeId, &[NodeId])> {
        let mut out = Vec::new();
        for lc in &self.levels {
            for (v, next) in lc.next.iter().enumerate() {
                if next.is_none() {
                    out.push((lc.level, v, lc.members[v].as_slice()));
                }
            }
        }
        out
    }
}

/// Builds `G_{j+1}` from the choices of level `j`.
///
/// Clusters are numbered in increasing center order. The tree of a new
/// cluster is the center's tree with each satellite tree rerooted at the
/// satellite-side endpoint of its join edge and hung below the center-side
/// endpoint.
pub fn advance(
    level: &Level,
    original: &MultiGraph,
    choices: &[Choice],
) -> (Level, Vec<Option<NodeId>>) {
    let mut next: Vec<Option<NodeId>> = vec![None; choices.len()];
    let mut count = 0;
    for (v, c) in choices.iter().enumerate() {
        if *c == Choice::Center {
            next[v] = Some(count);
            count += 1;
        }
    }
    for (v, c) in choices.iter().enumerate() {
        if let Choice::Join { center, .. } = c {
            next[v] = next[*center];
            debug_assert!(next[v].is_some(), "joined a non-center");
        }
    }

    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); count];
    let mut trees: Vec<Option<ClusterTree>> = vec![None; count];
    for (v, c) in choices.iter().enumerate() {
        if *c == Choice::Center {
            trees[next[v].unwrap()] = Some(level.trees[v].clone());
        }
    }
    for (v, c) in choices.iter().enumerate() {
        let Some(w) = next[v] else { continue };
        members[w].extend_from_slice(&level.members[v]);
        if let Choice::Join { center, edge } = *c {
            let e = original.edge(edge).expect("join edge is an original edge");
            let (inner, outer) = if level.owner[e.u] == Some(v) {
                (e.u, e.v)
            } else {
                (e.v, e.u)
            };
            debug_assert_eq!(level.owner[outer], Some(center));
            let sub = level.trees[v].rerooted(inner);
            trees[w].as_mut().unwrap().attach(sub, outer, edge);
        }
    }
    for m in &mut members {
        m.sort_unstable();
    }
    let trees: Vec<ClusterTree> = trees.into_iter().map(Option::unwrap).collect();
    let bound = 3usize.pow(level.index as u32 + 1) - 1;
    for t in &trees {
        let h = t.height();
        assert!(h <= bound, "cluster tree height {h} exceeds {bound}");
    }

    let mut owner = vec![None; level.owner.len()];
    for (w, m) in members.iter().enumerate() {
        for &x in m {
            owner[x] = Some(w);
        }
    }
    let graph = level.graph.contract(&next, count);
    (
        Level {
            index: level.index + 1,
            graph,
            members,
            trees,
            owner,
        },
        next,
    )
}

/// Per-level counters reported with a [`SpannerResult`](super::SpannerResult).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    pub nodes: usize,
    pub edges: usize,
    pub light: usize,
    pub heavy: usize,
    pub failures: usize,
    pub centers: usize,
    /// Non-center nodes merged into a center.
    pub joined: usize,
    pub unclustered: usize,
    /// Heavy nodes, neither center nor merged.
    pub heavy_unclustered: usize,
    pub accepted_edges: usize,
    pub max_trials: u32,
    pub samples_per_trial: u64,
    pub neighbor_threshold: u64,
    pub center_prob: f64,
}

impl LevelStats {
    pub(crate) fn new(level: &Level, budgets: &LevelBudgets) -> Self {
        Self {
            level: level.index,
            nodes: level.node_count(),
            edges: level.graph.edge_count(),
            samples_per_trial: budgets.samples_per_trial,
            neighbor_threshold: budgets.neighbor_threshold,
            center_prob: budgets.center_prob,
            ..Default::default()
        }
    }

    pub(crate) fn record_class(&mut self, class: Classification, trials: u32) {
        match class {
            Classification::Light => self.light += 1,
            Classification::Heavy => self.heavy += 1,
            Classification::Failure => self.failures += 1,
        }
        self.max_trials = self.max_trials.max(trials);
    }

    pub(crate) fn record_choices(&mut self, choices: &[Choice], classes: &[Classification]) {
        for (c, class) in choices.iter().zip(classes) {
            match c {
                Choice::Center => self.centers += 1,
                Choice::Join { .. } => self.joined += 1,
                Choice::Unclustered => {
                    self.unclustered += 1;
                    if *class == Classification::Heavy {
                        self.heavy_unclustered += 1;
                    }
                }
            }
        }
    }
}
