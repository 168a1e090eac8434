//! Round-synchronous LOCAL-model simulation.

mod distributed;
mod engine;
mod sessions;
mod tree;

pub use distributed::{
    round_schedule, run_distributed_sampler, DistributedRun, MESSAGE_CONSTANT, ROUND_CONSTANT,
    TREE_MESSAGE_CONSTANT,
};
pub use engine::{Counters, Engine, Envelope, PhaseCounters};
pub use sessions::{broadcast_convergecast, tree_gather, tree_multicast, Forest, SessionOutcome};
pub use tree::ClusterTree;
