//! Tree sessions over cluster trees: broadcast, convergecast, and their
//! sparse variants that only use the tree edges leading to members with
//! something to send or receive.
//!
//! All trees of a [`Forest`] run concurrently; a session over several trees
//! takes as many rounds as its tallest participant.

use std::collections::BTreeMap;

use super::engine::Engine;
use super::tree::ClusterTree;
use crate::graph::{EdgeId, NodeId};

/// Lookup tables for a set of node-disjoint cluster trees.
#[derive(Debug, Clone)]
pub struct Forest {
    roots: Vec<NodeId>,
    tree_of: Vec<Option<usize>>,
    parent: Vec<Option<(NodeId, EdgeId)>>,
    depth: Vec<usize>,
    children: Vec<Vec<(NodeId, EdgeId)>>,
}

impl Forest {
    /// Forest over original nodes `0..n`. Nodes outside every tree stay unassigned.
    pub fn new(n: usize, trees: &[ClusterTree]) -> Self {
        let mut f = Self {
            roots: trees.iter().map(ClusterTree::root).collect(),
            tree_of: vec![None; n],
            parent: vec![None; n],
            depth: vec![0; n],
            children: vec![Vec::new(); n],
        };
        for (i, t) in trees.iter().enumerate() {
            for (x, d) in t.depths() {
                assert!(f.tree_of[x].is_none(), "trees overlap at node {x}");
                f.tree_of[x] = Some(i);
                f.depth[x] = d;
            }
            for (c, p, e) in t.edges() {
                f.parent[c] = Some((p, e));
            }
            for (p, kids) in t.children() {
                f.children[p] = kids;
            }
        }
        f
    }

    pub fn tree_count(&self) -> usize {
        self.roots.len()
    }

    pub fn root(&self, tree: usize) -> NodeId {
        self.roots[tree]
    }

    pub fn tree_of(&self, x: NodeId) -> Option<usize> {
        self.tree_of[x]
    }

    pub fn parent(&self, x: NodeId) -> Option<(NodeId, EdgeId)> {
        self.parent[x]
    }

    pub fn depth(&self, x: NodeId) -> usize {
        self.depth[x]
    }

    pub fn children(&self, x: NodeId) -> &[(NodeId, EdgeId)] {
        &self.children[x]
    }

    pub fn height(&self) -> usize {
        self.tree_of
            .iter()
            .zip(&self.depth)
            .filter(|(t, _)| t.is_some())
            .map(|(_, &d)| d)
            .max()
            .unwrap_or(0)
    }
}

/// Result of a broadcast-convergecast session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionOutcome<M> {
    /// Aggregated reply at each tree's root, in tree order.
    pub replies: Vec<M>,
    pub rounds: usize,
    pub messages: u64,
}

/// One broadcast-convergecast session on every tree of `forest`.
///
/// The root of tree `i` broadcasts `payloads[i]` down; every member `x`
/// answers with `reply(x, payload)`, and answers are folded up with
/// `combine(x, own, children)`. Costs two messages per tree edge and twice
/// the tree height in rounds.
pub fn broadcast_convergecast<M: Clone>(
    engine: &mut Engine<'_, M>,
    forest: &Forest,
    payloads: Vec<M>,
    mut reply: impl FnMut(NodeId, &M) -> M,
    mut combine: impl FnMut(NodeId, M, Vec<M>) -> M,
) -> SessionOutcome<M> {
    assert_eq!(payloads.len(), forest.tree_count());
    let start = (engine.round(), engine.counters().total_messages);
    let n = forest.tree_of.len();

    // down
    let mut got: Vec<Option<M>> = vec![None; n];
    let mut frontier: Vec<NodeId> = Vec::new();
    for (i, p) in payloads.into_iter().enumerate() {
        let r = forest.root(i);
        got[r] = Some(p);
        frontier.push(r);
    }
    loop {
        for &x in &frontier {
            for &(_, e) in forest.children(x) {
                engine.send(x, e, got[x].clone().unwrap());
            }
        }
        if engine.pending() == 0 {
            break;
        }
        engine.step_round();
        frontier.clear();
        for m in engine.drain_inbox() {
            frontier.push(m.to);
            got[m.to] = Some(m.payload);
        }
    }

    // up
    let mut waiting: Vec<usize> = (0..n).map(|x| forest.children(x).len()).collect();
    let mut collected: Vec<Vec<M>> = vec![Vec::new(); n];
    let mut replies: Vec<Option<M>> = vec![None; forest.tree_count()];
    let mut ready: Vec<NodeId> = (0..n)
        .filter(|&x| forest.tree_of(x).is_some() && waiting[x] == 0)
        .collect();
    loop {
        for &x in &ready {
            let own = reply(x, got[x].as_ref().unwrap());
            let agg = combine(x, own, std::mem::take(&mut collected[x]));
            match forest.parent(x) {
                Some((_, e)) => engine.send(x, e, agg),
                None => replies[forest.tree_of(x).unwrap()] = Some(agg),
            }
        }
        if engine.pending() == 0 {
            break;
        }
        engine.step_round();
        ready.clear();
        for m in engine.drain_inbox() {
            collected[m.to].push(m.payload);
            waiting[m.to] -= 1;
            if waiting[m.to] == 0 {
                ready.push(m.to);
            }
        }
    }

    SessionOutcome {
        replies: replies.into_iter().map(Option::unwrap).collect(),
        rounds: (engine.round() - start.0) as usize,
        messages: engine.counters().total_messages - start.1,
    }
}

/// Routes each `(target, item)` from the root of the target's tree down to
/// `target`, merging items that share tree edges into one message.
///
/// Returns the delivered `(target, item)` pairs and the rounds used (the
/// deepest target's depth). Targets outside the forest are ignored.
pub fn tree_multicast<M: Clone>(
    engine: &mut Engine<'_, Vec<M>>,
    forest: &Forest,
    items: Vec<(NodeId, M)>,
) -> (Vec<(NodeId, M)>, usize) {
    let mut delivered = Vec::new();
    // node → items whose target lies in its subtree, keyed by depth of the node
    let mut by_depth: BTreeMap<usize, BTreeMap<NodeId, Vec<(NodeId, M)>>> = BTreeMap::new();
    for (target, item) in items {
        if forest.tree_of(target).is_none() {
            continue;
        }
        let mut x = target;
        loop {
            by_depth
                .entry(forest.depth(x))
                .or_default()
                .entry(x)
                .or_default()
                .push((target, item.clone()));
            match forest.parent(x) {
                Some((p, _)) => x = p,
                None => break,
            }
        }
    }
    let mut rounds = 0;
    for (depth, nodes) in by_depth {
        if depth == 0 {
            for (x, list) in nodes {
                delivered.extend(list.into_iter().filter(|(t, _)| *t == x));
            }
            continue;
        }
        for (x, list) in &nodes {
            let (p, e) = forest.parent(*x).unwrap();
            engine.send(p, e, list.iter().map(|(_, m)| m.clone()).collect());
        }
        engine.step_round();
        rounds += 1;
        engine.drain_inbox();
        for (x, list) in nodes {
            delivered.extend(list.into_iter().filter(|(t, _)| *t == x));
        }
    }
    (delivered, rounds)
}

/// Carries each `(member, item)` up to the root of the member's tree. Nodes
/// forward in depth order, one message per tree edge that has anything to carry.
///
/// Returns, per tree, the items collected at its root, and the rounds used.
pub fn tree_gather<M>(
    engine: &mut Engine<'_, Vec<M>>,
    forest: &Forest,
    items: Vec<(NodeId, M)>,
) -> (Vec<Vec<M>>, usize) {
    let mut at_root: Vec<Vec<M>> = (0..forest.tree_count()).map(|_| Vec::new()).collect();
    let mut pending: BTreeMap<usize, BTreeMap<NodeId, Vec<M>>> = BTreeMap::new();
    for (x, item) in items {
        let Some(t) = forest.tree_of(x) else { continue };
        match forest.depth(x) {
            0 => at_root[t].push(item),
            d => pending
                .entry(d)
                .or_default()
                .entry(x)
                .or_default()
                .push(item),
        }
    }
    let mut rounds = 0;
    while let Some((depth, nodes)) = pending.pop_last() {
        for (x, bundle) in nodes {
            let (_, e) = forest.parent(x).unwrap();
            engine.send(x, e, bundle);
        }
        engine.step_round();
        rounds += 1;
        for m in engine.drain_inbox() {
            if depth == 1 {
                at_root[forest.tree_of(m.to).unwrap()].extend(m.payload);
            } else {
                pending
                    .entry(depth - 1)
                    .or_default()
                    .entry(m.to)
                    .or_default()
                    .extend(m.payload);
            }
        }
    }
    (at_root, rounds)
}
