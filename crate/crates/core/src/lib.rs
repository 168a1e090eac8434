//! Message-efficient spanner construction in the LOCAL model.
//!
//! * [`graph`]: multigraphs with unique edge IDs, contraction, BFS oracles.
//! * [`sampler`]: the centralized edge-sampling spanner construction.
//! * [`localsim`]: a synchronous message-passing engine and the distributed
//!   run of the sampler over cluster trees.
//! * [`broadcast`]: t-local broadcast by flooding over a spanner.
//! * [`verify`]: exact checks of stretch, cluster diameter, partition and
//!   size/complexity bounds.

pub mod broadcast;
pub mod generate;
pub mod graph;
pub mod localsim;
pub mod rng;
pub mod sampler;
pub mod verify;

pub use graph::{Edge, EdgeId, MultiGraph, NodeId, Partition};
pub use localsim::{run_distributed_sampler, ClusterTree, Counters, DistributedRun, Engine};
pub use sampler::{sampler, ClusterAssignment, Params, SamplerRun, SpannerResult};
