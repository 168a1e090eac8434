//! Distributed execution of the sampler on the real graph.
//!
//! Virtual node `v` of level `j` is hosted at the root of its cluster tree
//! `T_j(v)`. A message over a virtual edge travels down `v`'s tree to the
//! member owning the edge, crosses the original edge, and climbs the peer's
//! tree. Tree legs use sparse multicast/gather sessions so concurrent
//! messages share tree edges. Every session is padded to `3^j - 1` rounds so
//! all clusters stay in lock-step; all `2h` trials are scheduled even for
//! nodes that are already done.
//!
//! Schedule of level `j` with `B = 3^j - 1`:
//!
//! | phase | rounds |
//! |---|---|
//! | level start: members report live edges to the host | `B` |
//! | each of `2h` trials: order, query hop, gather, reply order, reply hop, gather | `4B + 2` |
//! | second step (`j < k`): center query round trip | `4B + 2` |
//! | second step: join/retire order, hop, gather, member update | `3B + 1` |

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::engine::{Counters, Engine};
use super::sessions::{tree_gather, tree_multicast, Forest};
use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::rng::{self, Purpose};
use crate::sampler::{
    advance, check_params, derive_budgets, mark_centers, Choice, Classification, ClusterAssignment,
    Level, NeighborHits, NodeTrials, Params, RunBuilder, SamplerError, SpannerResult,
};

/// Pinned round constant: `rounds_elapsed <= ROUND_CONSTANT * 3^k * h`.
/// The schedule is at most `(8h + 8) * 3^j` rounds at level `j`, which sums to
/// less than `24 * 3^k * h` for every `k, h >= 1`.
pub const ROUND_CONSTANT: u64 = 24;
/// Pinned constant of the sampling term of the message bound. The largest
/// measured ratio on the acceptance graphs is about 0.04 (dense, small `n`, `k = 2`).
pub const MESSAGE_CONSTANT: f64 = 0.1;
/// Pinned constant of the tree-session term of the message bound.
pub const TREE_MESSAGE_CONSTANT: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributedRun {
    pub result: SpannerResult,
    pub assignment: ClusterAssignment,
    pub counters: Counters,
}

/// Rounds taken by a distributed run with parameters `k` and `h`. The
/// schedule is fixed, so this is exact, not a bound.
pub fn round_schedule(k: u32, h: u32) -> u64 {
    (0..=k)
        .map(|j| {
            let b = 3u64.pow(j) - 1;
            let trials = 2 * h as u64 * (4 * b + 2);
            let second = if j < k { 7 * b + 3 } else { 0 };
            b + trials + second
        })
        .sum()
}

/// Payloads exchanged by members and hosts. Every variant names the
/// original edge it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Msg {
    /// Member to host: an incident edge not known to be dead.
    Report {
        edge: EdgeId,
        member: NodeId,
    },
    /// Sampling query from the virtual node hosted at `from`.
    Query {
        edge: EdgeId,
        from: NodeId,
    },
    /// Answer naming the peer's host and all edges between the two clusters.
    Reply {
        edge: EdgeId,
        peer: NodeId,
        parallel: Arc<[EdgeId]>,
    },
    /// The receiving cluster left the level graph earlier.
    Retired {
        edge: EdgeId,
    },
    CenterQuery {
        edge: EdgeId,
        from: NodeId,
    },
    CenterReply {
        edge: EdgeId,
        center: bool,
    },
    Join {
        edge: EdgeId,
        satellite: NodeId,
    },
    /// An unclustered node leaves; `parallel` are all its edges to the receiver.
    Leave {
        edge: EdgeId,
        parallel: Arc<[EdgeId]>,
    },
    /// Host to member: stop reporting `edge`.
    Dead {
        edge: EdgeId,
    },
}

impl Msg {
    fn edge(&self) -> EdgeId {
        match *self {
            Msg::Report { edge, .. }
            | Msg::Query { edge, .. }
            | Msg::Reply { edge, .. }
            | Msg::Retired { edge }
            | Msg::CenterQuery { edge, .. }
            | Msg::CenterReply { edge, .. }
            | Msg::Join { edge, .. }
            | Msg::Leave { edge, .. }
            | Msg::Dead { edge } => edge,
        }
    }
}

/// What a host knows about its virtual node's incident edges.
#[derive(Debug, Default, Clone)]
struct HostView {
    /// live edge → owning member
    owner: BTreeMap<EdgeId, NodeId>,
    /// neighbor virtual node → edges to it, sorted
    by_peer: BTreeMap<NodeId, Arc<[EdgeId]>>,
}

struct Sim<'g> {
    g: &'g MultiGraph,
    engine: Engine<'g, Vec<Msg>>,
    /// per original node: incident edges known to lead to retired clusters
    dead: Vec<Vec<EdgeId>>,
    retired: Vec<bool>,
    /// false once a retiring node could not notify every neighbor
    exact: bool,
}

impl<'g> Sim<'g> {
    fn pad(&mut self, used: usize, budget: usize) {
        debug_assert!(
            used <= budget,
            "session took {used} rounds, budget {budget}"
        );
        self.engine.idle(budget.saturating_sub(used));
    }

    fn multicast(
        &mut self,
        forest: &Forest,
        items: Vec<(NodeId, Msg)>,
        b: usize,
    ) -> Vec<(NodeId, Msg)> {
        let (got, r) = tree_multicast(&mut self.engine, forest, items);
        self.pad(r, b);
        got
    }

    fn gather(&mut self, forest: &Forest, items: Vec<(NodeId, Msg)>, b: usize) -> Vec<Vec<Msg>> {
        let (got, r) = tree_gather(&mut self.engine, forest, items);
        self.pad(r, b);
        got
    }

    /// Every member sends its message over the edge it names; one round.
    fn hop(&mut self, items: Vec<(NodeId, Msg)>) -> Vec<(NodeId, Msg)> {
        for (x, m) in items {
            let e = m.edge();
            self.engine.send(x, e, vec![m]);
        }
        self.engine.step_round();
        self.engine
            .drain_inbox()
            .into_iter()
            .flat_map(|env| {
                let to = env.to;
                env.payload.into_iter().map(move |m| (to, m))
            })
            .collect()
    }

    /// Members report their live incident edges; an edge reported twice
    /// lies inside the cluster.
    fn collect_views(&mut self, level: &Level, forest: &Forest, b: usize) -> Vec<HostView> {
        let mut items = Vec::new();
        for x in 0..self.g.node_count() {
            if self.retired[x] {
                continue;
            }
            for &(_, e) in self.g.incident(x) {
                if self.dead[x].binary_search(&e).is_err() {
                    items.push((x, Msg::Report { edge: e, member: x }));
                }
            }
        }
        let reports = self.gather(forest, items, b);
        reports
            .into_iter()
            .map(|list| {
                let mut seen: BTreeMap<EdgeId, (NodeId, usize)> = BTreeMap::new();
                for m in list {
                    if let Msg::Report { edge, member } = m {
                        seen.entry(edge).or_insert((member, 0)).1 += 1;
                    }
                }
                let mut view = HostView::default();
                let mut by_peer: BTreeMap<NodeId, Vec<EdgeId>> = BTreeMap::new();
                for (e, (member, count)) in seen {
                    if count > 1 {
                        continue;
                    }
                    view.owner.insert(e, member);
                    let far = self.g.edge(e).unwrap().other(member);
                    if let Some(peer) = level.owner[far] {
                        by_peer.entry(peer).or_default().push(e);
                    }
                }
                view.by_peer = by_peer.into_iter().map(|(u, es)| (u, es.into())).collect();
                view
            })
            .collect()
    }

    /// One lock-step trial for every virtual node of the level.
    #[allow(clippy::too_many_arguments)]
    fn trial(
        &mut self,
        level: &Level,
        forest: &Forest,
        views: &[HostView],
        trials: &mut [NodeTrials],
        params: &Params,
        samples: u64,
        wanting: &[bool],
        b: usize,
    ) -> Vec<Vec<EdgeId>> {
        let mut orders = Vec::new();
        for v in 0..level.node_count() {
            if !wanting[v] {
                continue;
            }
            let host = level.host(v);
            let purpose = Purpose::Trial(trials[v].trials_run() + 1);
            let mut r = rng::stream(params.seed, level.index, host, purpose);
            for e in trials[v].draw(samples, &mut r) {
                orders.push((
                    views[v].owner[&e],
                    Msg::Query {
                        edge: e,
                        from: host,
                    },
                ));
            }
        }
        let at_members = self.multicast(forest, orders, b);
        let arrived = self.hop(at_members);

        let (retired, live): (Vec<_>, Vec<_>) =
            arrived.into_iter().partition(|(y, _)| self.retired[*y]);
        let queries = self.gather(forest, live, b);
        let mut replies = Vec::new();
        for (u, list) in queries.into_iter().enumerate() {
            let uhost = level.host(u);
            for m in list {
                let Msg::Query { edge, from } = m else {
                    unreachable!()
                };
                let v = level.owner[from].expect("querier is part of the level");
                let parallel = views[u].by_peer.get(&v).cloned().unwrap_or_default();
                replies.push((
                    views[u].owner[&edge],
                    Msg::Reply {
                        edge,
                        peer: uhost,
                        parallel,
                    },
                ));
            }
        }
        let mut back = self.multicast(forest, replies, b);
        back.extend(
            retired
                .into_iter()
                .map(|(y, m)| (y, Msg::Retired { edge: m.edge() })),
        );
        let returned = self.hop(back);
        let gathered = self.gather(forest, returned, b);

        let mut dead_found = vec![Vec::new(); level.node_count()];
        for (v, list) in gathered.into_iter().enumerate() {
            if !wanting[v] {
                debug_assert!(list.is_empty());
                continue;
            }
            let mut groups: BTreeMap<NodeId, NeighborHits> = BTreeMap::new();
            for m in list {
                match m {
                    Msg::Reply {
                        edge,
                        peer,
                        parallel,
                    } => {
                        let u = level.owner[peer].expect("peer is part of the level");
                        groups
                            .entry(u)
                            .or_insert_with(|| NeighborHits {
                                neighbor: u,
                                hit_edges: Vec::new(),
                                parallel: parallel.to_vec(),
                            })
                            .hit_edges
                            .push(edge);
                    }
                    Msg::Retired { edge } => dead_found[v].push(edge),
                    other => unreachable!("unexpected {other:?}"),
                }
            }
            trials[v].absorb(groups.into_values().collect(), &dead_found[v]);
        }
        dead_found
    }

    /// Center marking, joins and departures. Returns the choices of every
    /// virtual node.
    #[allow(clippy::too_many_arguments)]
    fn second_step(
        &mut self,
        level: &Level,
        forest: &Forest,
        views: &[HostView],
        trials: &[NodeTrials],
        classes: &[Classification],
        is_center: &[bool],
        mut dead_found: Vec<Vec<EdgeId>>,
        b: usize,
    ) -> Vec<Choice> {
        let nj = level.node_count();

        // which queried neighbors are centers
        let mut orders = Vec::new();
        for v in 0..nj {
            if is_center[v] {
                continue;
            }
            for &(e, _) in trials[v].accepted() {
                orders.push((
                    views[v].owner[&e],
                    Msg::CenterQuery {
                        edge: e,
                        from: level.host(v),
                    },
                ));
            }
        }
        let at_members = self.multicast(forest, orders, b);
        let arrived = self.hop(at_members);
        let asked = self.gather(forest, arrived, b);
        let mut answers = Vec::new();
        for (u, list) in asked.into_iter().enumerate() {
            for m in list {
                let edge = m.edge();
                answers.push((
                    views[u].owner[&edge],
                    Msg::CenterReply {
                        edge,
                        center: is_center[u],
                    },
                ));
            }
        }
        let back = self.multicast(forest, answers, b);
        let returned = self.hop(back);
        let learned = self.gather(forest, returned, b);

        let mut choices = Vec::with_capacity(nj);
        for (v, list) in learned.into_iter().enumerate() {
            if is_center[v] {
                choices.push(Choice::Center);
                continue;
            }
            let centers: Vec<EdgeId> = list
                .into_iter()
                .filter_map(|m| match m {
                    Msg::CenterReply { edge, center: true } => Some(edge),
                    _ => None,
                })
                .collect();
            let choice = trials[v]
                .accepted()
                .iter()
                .filter(|(e, _)| centers.contains(e))
                .min_by_key(|&&(_, u)| u)
                .map_or(Choice::Unclustered, |&(edge, center)| Choice::Join {
                    center,
                    edge,
                });
            choices.push(choice);
        }

        // joins and departures
        let mut orders = Vec::new();
        for v in 0..nj {
            match choices[v] {
                Choice::Center => {}
                Choice::Join { edge, .. } => {
                    orders.push((
                        views[v].owner[&edge],
                        Msg::Join {
                            edge,
                            satellite: level.host(v),
                        },
                    ));
                }
                Choice::Unclustered => {
                    if classes[v] != Classification::Light {
                        self.exact = false;
                    }
                    for &(e, u) in trials[v].accepted() {
                        let parallel = views[v].by_peer.get(&u).cloned().unwrap_or_default();
                        orders.push((views[v].owner[&e], Msg::Leave { edge: e, parallel }));
                    }
                }
            }
        }
        let at_members = self.multicast(forest, orders, b);
        let arrived = self.hop(at_members);
        let notices = self.gather(forest, arrived, b);
        for (u, list) in notices.into_iter().enumerate() {
            for m in list {
                if let Msg::Leave { parallel, .. } = m {
                    dead_found[u].extend(parallel.iter().copied());
                }
            }
        }

        // hosts tell members which edges died; satellites learn their new cluster
        let mut updates = Vec::new();
        for (v, dead) in dead_found.iter().enumerate() {
            for &e in dead {
                if let Some(&x) = views[v].owner.get(&e) {
                    updates.push((x, Msg::Dead { edge: e }));
                }
            }
        }
        for (x, m) in self.multicast(forest, updates, b) {
            self.dead[x].push(m.edge());
        }
        for d in &mut self.dead {
            d.sort_unstable();
            d.dedup();
        }
        choices
    }
}

/// Runs the sampler as a synchronous protocol on `g`, metering every message
/// and round. Without classification failures the output equals
/// [`sampler`](crate::sampler::sampler) with the same parameters.
pub fn run_distributed_sampler(
    g: &MultiGraph,
    params: &Params,
) -> Result<DistributedRun, SamplerError> {
    check_params(g, params)?;
    let n = g.node_count();
    let k = params.k as usize;
    let mut sim = Sim {
        g,
        engine: Engine::new(g),
        dead: vec![Vec::new(); n],
        retired: vec![false; n],
        exact: true,
    };
    let mut out = RunBuilder::default();
    let mut level = Level::initial(g);
    for j in 0..=k {
        sim.engine.begin_phase(j);
        let budgets = derive_budgets(params, j);
        let b = 3usize.pow(j as u32) - 1;
        let forest = Forest::new(n, &level.trees);

        let views = sim.collect_views(&level, &forest, b);
        let mut trials: Vec<NodeTrials> = views
            .iter()
            .map(|view| NodeTrials::new(view.owner.keys().copied().collect()))
            .collect();
        if sim.exact {
            for (v, t) in trials.iter().enumerate() {
                debug_assert_eq!(
                    t,
                    &NodeTrials::for_node(&level.graph, v),
                    "view of {v} at level {j}"
                );
            }
        }

        let mut dead_found = vec![Vec::new(); level.node_count()];
        for _ in 0..budgets.trial_count {
            let wanting: Vec<bool> = trials.iter().map(|t| t.wants_trial(&budgets)).collect();
            let found = sim.trial(
                &level,
                &forest,
                &views,
                &mut trials,
                params,
                budgets.samples_per_trial,
                &wanting,
                b,
            );
            for (acc, f) in dead_found.iter_mut().zip(found) {
                acc.extend(f);
            }
        }

        let (stats, classes) = out.record_trials(&level, &budgets, &trials);
        if classes.contains(&Classification::Failure) {
            sim.exact = false;
        }
        let choices = if j < k {
            let is_center = mark_centers(&level, params, &budgets);
            sim.second_step(
                &level, &forest, &views, &trials, &classes, &is_center, dead_found, b,
            )
        } else {
            vec![Choice::Unclustered; level.node_count()]
        };
        for (v, c) in choices.iter().enumerate() {
            if *c == Choice::Unclustered {
                for &x in &level.members[v] {
                    sim.retired[x] = true;
                }
            }
        }
        if j < k {
            let (next_level, next) = advance(&level, g, &choices);
            out.record_level(&level, stats, &classes, &choices, next);
            level = next_level;
        } else {
            out.record_level(
                &level,
                stats,
                &classes,
                &choices,
                vec![None; level.node_count()],
            );
        }
    }
    let run = out.finish(params);
    let counters = sim.engine.into_counters();
    debug_assert_eq!(counters.rounds_elapsed, round_schedule(params.k, params.h));
    Ok(DistributedRun {
        result: run.result,
        assignment: run.assignment,
        counters,
    })
}
