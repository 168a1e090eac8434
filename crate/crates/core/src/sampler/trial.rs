//! First step of a clustering level: iterative edge-sampling trials.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::LevelBudgets;
use crate::graph::{EdgeId, MultiGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Every neighbor was queried.
    Light,
    /// Not every neighbor was queried, but at least the threshold many were.
    Heavy,
    /// Neither light nor heavy; the low-probability event the analysis excludes.
    Failure,
}

/// Everything a query reply tells the sampling node about one neighbor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborHits {
    pub neighbor: NodeId,
    /// Query edges of this trial that reached `neighbor`.
    pub hit_edges: Vec<EdgeId>,
    /// All parallel edges `E_j(v, neighbor)`, sorted.
    pub parallel: Vec<EdgeId>,
}

/// Trial state of one node `v` of a level graph.
///
/// `unexplored` is `X_v`, `accepted` is `F_v` with one edge per queried
/// neighbor, in the order neighbors were discovered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTrials {
    unexplored: Vec<EdgeId>,
    accepted: Vec<(EdgeId, NodeId)>,
    trials_run: u32,
}

impl NodeTrials {
    /// Starts with `X_v` set to the given incident edges.
    pub fn new(mut incident: Vec<EdgeId>) -> Self {
        incident.sort_unstable();
        incident.dedup();
        Self {
            unexplored: incident,
            accepted: Vec::new(),
            trials_run: 0,
        }
    }

    /// Starts from `v`'s incident edges in `g`.
    pub fn for_node(g: &MultiGraph, v: NodeId) -> Self {
        Self::new(g.incident(v).iter().map(|&(_, e)| e).collect())
    }

    pub fn unexplored(&self) -> &[EdgeId] {
        &self.unexplored
    }

    /// `F_v` as `(edge, neighbor)` pairs.
    pub fn accepted(&self) -> &[(EdgeId, NodeId)] {
        &self.accepted
    }

    pub fn queried_count(&self) -> usize {
        self.accepted.len()
    }

    pub fn trials_run(&self) -> u32 {
        self.trials_run
    }

    /// The accepted edge leading to `neighbor`, if it was queried.
    pub fn edge_to(&self, neighbor: NodeId) -> Option<EdgeId> {
        self.accepted
            .iter()
            .find(|&&(_, u)| u == neighbor)
            .map(|&(e, _)| e)
    }

    /// Loop guard, evaluated at trial boundaries: trials left, below the
    /// neighbor threshold, and `X_v` non-empty.
    pub fn wants_trial(&self, budgets: &LevelBudgets) -> bool {
        self.trials_run < budgets.trial_count
            && (self.accepted.len() as u64) < budgets.neighbor_threshold
            && !self.unexplored.is_empty()
    }

    /// Query edges for the next trial: every edge of `X_v` when the budget
    /// covers it, otherwise `samples` uniform draws with replacement.
    /// Returns distinct hit edges in increasing order.
    pub fn draw<R: Rng + ?Sized>(&self, samples: u64, rng: &mut R) -> Vec<EdgeId> {
        if samples >= self.unexplored.len() as u64 {
            self.unexplored.clone()
        } else {
            self.draw_with_replacement(samples, rng)
        }
    }

    /// `samples` uniform draws with replacement from `X_v`, without the full-scan shortcut.
    pub fn draw_with_replacement<R: Rng + ?Sized>(&self, samples: u64, rng: &mut R) -> Vec<EdgeId> {
        let len = self.unexplored.len();
        if len == 0 {
            return Vec::new();
        }
        let mut hit = vec![false; len];
        for _ in 0..samples {
            hit[rng.random_range(0..len)] = true;
        }
        self.unexplored
            .iter()
            .zip(hit)
            .filter(|&(_, h)| h)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Applies one trial's replies: per neighbor, the lowest hit edge joins
    /// `F_v` and every parallel edge leaves `X_v`. `dead` edges (peer no
    /// longer part of the level) are dropped from `X_v` without a query.
    /// Advances the trial counter.
    pub fn absorb(&mut self, mut groups: Vec<NeighborHits>, dead: &[EdgeId]) {
        groups.sort_unstable_by_key(|g| g.neighbor);
        let mut removed: Vec<EdgeId> = dead.to_vec();
        for g in groups {
            debug_assert!(self.edge_to(g.neighbor).is_none(), "neighbor queried twice");
            let Some(&first) = g.hit_edges.iter().min() else {
                continue;
            };
            self.accepted.push((first, g.neighbor));
            removed.extend(g.parallel);
            removed.extend(g.hit_edges);
        }
        removed.sort_unstable();
        self.unexplored
            .retain(|e| removed.binary_search(e).is_err());
        self.trials_run += 1;
    }

    /// One full trial against the level graph `g`, as node `v`.
    pub fn run_trial<R: Rng + ?Sized>(
        &mut self,
        g: &MultiGraph,
        v: NodeId,
        budgets: &LevelBudgets,
        rng: &mut R,
    ) {
        let hits = self.draw(budgets.samples_per_trial, rng);
        self.absorb(group_hits(g, v, &hits), &[]);
    }

    pub fn classify(&self, budgets: &LevelBudgets) -> Classification {
        if self.unexplored.is_empty() {
            Classification::Light
        } else if self.accepted.len() as u64 >= budgets.neighbor_threshold {
            Classification::Heavy
        } else {
            Classification::Failure
        }
    }
}

/// Groups hit edges of `v` by their far endpoint in `g`.
pub(crate) fn group_hits(g: &MultiGraph, v: NodeId, hits: &[EdgeId]) -> Vec<NeighborHits> {
    let mut by_neighbor: Vec<(NodeId, EdgeId)> = hits
        .iter()
        .map(|&e| {
            let edge = g.edge(e).expect("hit edge belongs to the level graph");
            (edge.other(v), e)
        })
        .collect();
    by_neighbor.sort_unstable();
    let mut out: Vec<NeighborHits> = Vec::new();
    for (u, e) in by_neighbor {
        match out.last_mut() {
            Some(last) if last.neighbor == u => last.hit_edges.push(e),
            _ => out.push(NeighborHits {
                neighbor: u,
                hit_edges: vec![e],
                parallel: g.edges_between(v, u).iter().map(|&(_, id)| id).collect(),
            }),
        }
    }
    out
}
