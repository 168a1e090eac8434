use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, MultiGraph, NodeId};

/// A message in flight or delivered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope<M> {
    pub from: NodeId,
    pub to: NodeId,
    pub edge: EdgeId,
    pub payload: M,
}

/// Messages and rounds attributed to one phase (a sampler level).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCounters {
    pub messages: u64,
    pub rounds: u64,
}

/// Message and round meters. A message is one send over one edge in one
/// direction in one round.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub total_messages: u64,
    pub rounds_elapsed: u64,
    pub per_level: Vec<PhaseCounters>,
}

/// Fully synchronous message-passing engine over a graph with unique edge IDs.
///
/// Messages queued with [`send`](Self::send) during round `r` are delivered
/// together by [`step_round`](Self::step_round), which starts round `r + 1`.
/// Deliveries are ordered by `(receiver, edge, sender)`.
#[derive(Debug)]
pub struct Engine<'g, M> {
    graph: &'g MultiGraph,
    round: u64,
    outbox: Vec<Envelope<M>>,
    inbox: Vec<Envelope<M>>,
    counters: Counters,
    phase: Option<usize>,
}

impl<'g, M> Engine<'g, M> {
    pub fn new(graph: &'g MultiGraph) -> Self {
        Self {
            graph,
            round: 0,
            outbox: Vec::new(),
            inbox: Vec::new(),
            counters: Counters::default(),
            phase: None,
        }
    }

    pub fn graph(&self) -> &'g MultiGraph {
        self.graph
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn into_counters(self) -> Counters {
        self.counters
    }

    /// Attributes subsequent messages and rounds to phase `index`.
    pub fn begin_phase(&mut self, index: usize) {
        if self.counters.per_level.len() <= index {
            self.counters
                .per_level
                .resize(index + 1, PhaseCounters::default());
        }
        self.phase = Some(index);
    }

    /// Queues `payload` from `from` over `edge`.
    ///
    /// # Panics
    /// If `edge` is not incident to `from`; nodes can only use their own edges.
    pub fn send(&mut self, from: NodeId, edge: EdgeId, payload: M) {
        let e = self
            .graph
            .edge(edge)
            .unwrap_or_else(|| panic!("node {from} sent over unknown edge {edge}"));
        assert!(
            e.has_endpoint(from),
            "node {from} sent over non-incident edge {edge}"
        );
        self.outbox.push(Envelope {
            from,
            to: e.other(from),
            edge,
            payload,
        });
    }

    pub fn pending(&self) -> usize {
        self.outbox.len()
    }

    /// Delivers everything queued this round and advances the round counter.
    /// Messages not drained from the previous round's inbox are discarded.
    pub fn step_round(&mut self) -> usize {
        let mut delivered = std::mem::take(&mut self.outbox);
        delivered.sort_by_key(|m| (m.to, m.edge, m.from));
        let count = delivered.len();
        self.inbox = delivered;
        self.round += 1;
        self.counters.total_messages += count as u64;
        self.counters.rounds_elapsed += 1;
        if let Some(p) = self.phase {
            let pc = &mut self.counters.per_level[p];
            pc.messages += count as u64;
            pc.rounds += 1;
        }
        count
    }

    /// Advances `rounds` rounds; anything queued goes out in the first one.
    pub fn idle(&mut self, rounds: usize) {
        for _ in 0..rounds {
            self.step_round();
        }
    }

    /// Messages delivered by the last round, sorted by `(receiver, edge, sender)`.
    pub fn inbox(&self) -> &[Envelope<M>] {
        &self.inbox
    }

    /// Messages delivered to `node` by the last round.
    pub fn inbox_of(&self, node: NodeId) -> &[Envelope<M>] {
        let start = self.inbox.partition_point(|m| m.to < node);
        let end = self.inbox.partition_point(|m| m.to <= node);
        &self.inbox[start..end]
    }

    pub fn drain_inbox(&mut self) -> Vec<Envelope<M>> {
        std::mem::take(&mut self.inbox)
    }
}
