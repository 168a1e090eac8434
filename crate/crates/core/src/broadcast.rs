//! t-local broadcast by flooding over a spanner.
//!
//! Every node floods its message over `H` for exactly `alpha * t` rounds. A
//! node forwards each origin once, on every spanner edge except the one it
//! first arrived on. With `alpha` at least the stretch of `H`, every node
//! within G-distance `t` of an origin receives its message.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{bfs_distances_within, EdgeId, MultiGraph, NodeId};
use crate::localsim::{Counters, Engine};
use crate::sampler::{sampler, Params, SamplerError, SpannerResult};

/// One t-local broadcast task over a fixed spanner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastInstance {
    pub t: u32,
    /// Flooding depth multiplier; should be at least the stretch of the spanner.
    pub alpha: u64,
    pub spanner_edges: Vec<EdgeId>,
    /// `M_v` for each node, opaque.
    pub messages: Vec<Vec<u8>>,
}

impl BroadcastInstance {
    /// Uses the spanner's stretch bound as `alpha` and each node's index as its message.
    pub fn new(n: usize, t: u32, spanner: &SpannerResult) -> Self {
        Self {
            t,
            alpha: spanner.stretch_bound,
            spanner_edges: spanner.spanner_edges.clone(),
            messages: (0..n).map(|v| (v as u64).to_le_bytes().to_vec()).collect(),
        }
    }

    pub fn with_alpha(mut self, alpha: u64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_messages(mut self, messages: Vec<Vec<u8>>) -> Self {
        self.messages = messages;
        self
    }

    pub fn rounds(&self) -> u64 {
        self.alpha * u64::from(self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastOutcome {
    /// Origins whose message each node holds, sorted; always includes itself.
    pub received: Vec<Vec<NodeId>>,
    /// Edge activations: one per edge, direction and round with anything to send.
    pub counters: Counters,
    /// Individual payloads carried, counting each origin in a bundle separately.
    pub payload_transmissions: u64,
}

impl BroadcastOutcome {
    /// The messages node `u` received, keyed by origin.
    pub fn messages_at<'a>(
        &self,
        inst: &'a BroadcastInstance,
        u: NodeId,
    ) -> BTreeMap<NodeId, &'a [u8]> {
        self.received[u]
            .iter()
            .map(|&o| (o, inst.messages[o].as_slice()))
            .collect()
    }
}

/// Floods every message over `H = (V, inst.spanner_edges)` for `alpha * t` rounds.
///
/// # Panics
/// If the number of messages differs from the node count of `g`.
pub fn t_local_broadcast(g: &MultiGraph, inst: &BroadcastInstance) -> BroadcastOutcome {
    let n = g.node_count();
    assert_eq!(inst.messages.len(), n, "one message per node");
    let h = g.edge_subgraph(&inst.spanner_edges);
    let mut engine: Engine<'_, Vec<NodeId>> = Engine::new(&h);
    // origin → edge it first arrived on (None for the node's own message)
    let mut known: Vec<BTreeMap<NodeId, Option<EdgeId>>> =
        (0..n).map(|v| BTreeMap::from([(v, None)])).collect();
    let mut fresh: Vec<Vec<NodeId>> = (0..n).map(|v| vec![v]).collect();
    let mut payloads = 0u64;

    for _ in 0..inst.rounds() {
        for x in 0..n {
            if fresh[x].is_empty() {
                continue;
            }
            for &(_, e) in h.incident(x) {
                let bundle: Vec<NodeId> = fresh[x]
                    .iter()
                    .copied()
                    .filter(|o| known[x][o] != Some(e))
                    .collect();
                if !bundle.is_empty() {
                    payloads += bundle.len() as u64;
                    engine.send(x, e, bundle);
                }
            }
            fresh[x].clear();
        }
        engine.step_round();
        for env in engine.drain_inbox() {
            for o in env.payload {
                if let std::collections::btree_map::Entry::Vacant(slot) = known[env.to].entry(o) {
                    slot.insert(Some(env.edge));
                    fresh[env.to].push(o);
                }
            }
        }
    }

    BroadcastOutcome {
        received: known.into_iter().map(|m| m.into_keys().collect()).collect(),
        counters: engine.into_counters(),
        payload_transmissions: payloads,
    }
}

/// A node that did not receive the message of an origin within G-distance `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Miss {
    pub node: NodeId,
    pub origin: NodeId,
}

/// Compares received sets against `B_{G,t}(u)` computed by BFS on `g`.
pub fn check_completeness(g: &MultiGraph, t: u32, received: &[Vec<NodeId>]) -> Vec<Miss> {
    let mut misses = Vec::new();
    for u in g.nodes() {
        let ball = bfs_distances_within(g, u, t as usize);
        for (v, d) in ball.iter().enumerate() {
            if d.is_some() && received[u].binary_search(&v).is_err() {
                misses.push(Miss { node: u, origin: v });
            }
        }
    }
    misses
}

/// Broadcast result with its completeness and cost checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastReport {
    pub t: u32,
    pub alpha: u64,
    pub rounds: u64,
    pub messages: u64,
    pub payload_transmissions: u64,
    /// `2 * alpha * t * |S|`.
    pub activation_bound: u64,
    pub misses: Vec<Miss>,
}

impl BroadcastReport {
    pub fn passed(&self) -> bool {
        self.misses.is_empty()
            && self.rounds == self.alpha * u64::from(self.t)
            && self.messages <= self.activation_bound
    }
}

/// Runs the broadcast and checks it against the BFS oracle on `g`.
pub fn run_and_check(g: &MultiGraph, inst: &BroadcastInstance) -> BroadcastReport {
    let out = t_local_broadcast(g, inst);
    BroadcastReport {
        t: inst.t,
        alpha: inst.alpha,
        rounds: out.counters.rounds_elapsed,
        messages: out.counters.total_messages,
        payload_transmissions: out.payload_transmissions,
        activation_bound: 2 * inst.rounds() * inst.spanner_edges.len() as u64,
        misses: check_completeness(g, inst.t, &out.received),
    }
}

/// Closed-form complexity of t-local broadcast through a stretch-`(2 * 3^gamma - 1)`
/// spanner: `t * n^(1 + 2 / (2^(gamma+1) - 1))` messages and `3^gamma * t + 6^gamma`
/// rounds, without hidden constants or polylog factors. Formula evaluations only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedComplexity {
    pub messages: f64,
    pub rounds: f64,
}

pub fn predicted_complexity(n: usize, t: u32, gamma: u32) -> PredictedComplexity {
    let exponent = 1.0 + 2.0 / ((1u64 << (gamma + 1)) - 1) as f64;
    PredictedComplexity {
        messages: f64::from(t) * (n as f64).powf(exponent),
        rounds: 3f64.powi(gamma as i32) * f64::from(t) + 6f64.powi(gamma as i32),
    }
}

/// Anything that builds a spanner of a graph, for use under the broadcast.
pub trait SpannerAlgorithm {
    type Error;

    fn name(&self) -> &str;

    /// Stretch guaranteed (with high probability) by [`build`](Self::build).
    fn stretch_bound(&self) -> u64;

    fn build(&self, g: &MultiGraph) -> Result<Vec<EdgeId>, Self::Error>;
}

/// The sampling construction of this crate.
#[derive(Debug, Clone)]
pub struct SamplerSpanner {
    pub params: Params,
}

impl SpannerAlgorithm for SamplerSpanner {
    type Error = SamplerError;

    fn name(&self) -> &str {
        "sampler"
    }

    fn stretch_bound(&self) -> u64 {
        self.params.stretch_bound()
    }

    fn build(&self, g: &MultiGraph) -> Result<Vec<EdgeId>, SamplerError> {
        Ok(sampler(g, &self.params)?.result.spanner_edges)
    }
}

/// Builds a spanner with `algo` and broadcasts over it with `alpha = algo.stretch_bound()`.
pub fn broadcast_with<A: SpannerAlgorithm>(
    g: &MultiGraph,
    algo: &A,
    t: u32,
) -> Result<BroadcastReport, A::Error> {
    let edges = algo.build(g)?;
    let inst = BroadcastInstance {
        t,
        alpha: algo.stretch_bound(),
        spanner_edges: edges,
        messages: (0..g.node_count())
            .map(|v| (v as u64).to_le_bytes().to_vec())
            .collect(),
    };
    Ok(run_and_check(g, &inst))
}
