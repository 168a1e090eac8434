//! Undirected multigraphs with globally unique edge IDs.
//!
//! Every level of the spanner construction works on a [`MultiGraph`]: the
//! input graph is simple, but contracting clusters produces parallel edges
//! between the same pair of cluster nodes. Edge IDs are carried through every
//! contraction unchanged, so an edge of any level graph can always be traced
//! back to the original edge it came from.

mod bfs;
mod io;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bfs::{bfs_distances, bfs_distances_within, diameter, Distance};
pub use io::{parse_graph, parse_graph_with_comments, write_graph};

/// Dense 0-based node index within one graph.
pub type NodeId = usize;

/// Opaque edge identifier, unique across a graph and preserved by contraction.
pub type EdgeId = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {id}: self-loop on node {node}")]
    SelfLoop { id: EdgeId, node: NodeId },
    #[error("edge {id}: endpoint {node} out of range for {n} nodes")]
    EndpointOutOfRange { id: EdgeId, node: NodeId, n: usize },
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("node set is empty")]
    EmptyNodeSet,
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One undirected edge. `u < v` is not guaranteed; endpoints are stored as given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
}

impl Edge {
    /// The endpoint opposite to `x`. Panics if `x` is not an endpoint.
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else if x == self.v {
            self.u
        } else {
            panic!("node {x} is not an endpoint of edge {}", self.id)
        }
    }

    pub fn has_endpoint(&self, x: NodeId) -> bool {
        self.u == x || self.v == x
    }
}

/// Undirected multigraph with unique edge IDs and no self-loops.
///
/// Adjacency lists hold `(neighbor, edge_id)` pairs sorted by neighbor and
/// then by edge ID, so the parallel edges `E(u, v)` form one contiguous run.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiGraph {
    node_count: usize,
    // sorted by edge id
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
}

impl fmt::Debug for MultiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiGraph")
            .field("nodes", &self.node_count)
            .field("edges", &self.edges.len())
            .finish()
    }
}

impl MultiGraph {
    /// Builds a graph from `(u, v)` pairs; IDs are assigned 0, 1, 2, ... in list order.
    pub fn from_pairs(
        n: usize,
        pairs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let edges = pairs.into_iter().enumerate().map(|(i, (u, v))| Edge {
            id: i as EdgeId,
            u,
            v,
        });
        Self::from_edges(n, edges)
    }

    /// Builds a graph from edges with explicit IDs.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            for node in [e.u, e.v] {
                if node >= n {
                    return Err(GraphError::EndpointOutOfRange { id: e.id, node, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop {
                    id: e.id,
                    node: e.u,
                });
            }
        }
        edges.sort_unstable_by_key(|e| e.id);
        if let Some(w) = edges.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateEdgeId(w[0].id));
        }
        Ok(Self::from_sorted_unchecked(n, edges))
    }

    /// Builds a graph from edges already validated and sorted by ID.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0].id < w[1].id));
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut adjacency: Vec<Vec<(NodeId, EdgeId)>> =
            degree.into_iter().map(Vec::with_capacity).collect();
        for e in &edges {
            adjacency[e.u].push((e.v, e.id));
            adjacency[e.v].push((e.u, e.id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            node_count: n,
            edges,
            adjacency,
        }
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unchecked(n, Vec::new())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count
    }

    /// All edges in increasing ID order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edge(id).is_some()
    }

    /// Incident `(neighbor, edge_id)` pairs of `v`, sorted by neighbor then edge ID.
    pub fn incident(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[v]
    }

    /// Number of incident edges, counting parallel edges separately.
    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    /// Distinct neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let list = &self.adjacency[v];
        list.iter()
            .enumerate()
            .filter(move |(i, (u, _))| *i == 0 || list[i - 1].0 != *u)
            .map(|(_, (u, _))| *u)
    }

    pub fn neighbor_count(&self, v: NodeId) -> usize {
        self.neighbors(v).count()
    }

    /// IDs of all edges with endpoints `{u, v}`, in increasing order.
    pub fn edges_between(&self, u: NodeId, v: NodeId) -> &[(NodeId, EdgeId)] {
        let list = &self.adjacency[u];
        let start = list.partition_point(|&(w, _)| w < v);
        let end = list.partition_point(|&(w, _)| w <= v);
        &list[start..end]
    }

    /// Same as [`edges_between`](Self::edges_between) but as a set of IDs.
    pub fn edge_ids_between(&self, u: NodeId, v: NodeId) -> BTreeSet<EdgeId> {
        self.edges_between(u, v).iter().map(|&(_, id)| id).collect()
    }

    /// Subgraph induced by `nodes`, relabeled densely in increasing original order.
    ///
    /// Returns the subgraph and the table mapping new node index to original node.
    /// Original edge IDs are preserved.
    pub fn induced_subgraph(
        &self,
        nodes: &[NodeId],
    ) -> Result<(MultiGraph, Vec<NodeId>), GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::EmptyNodeSet);
        }
        let mut original: Vec<NodeId> = nodes.to_vec();
        original.sort_unstable();
        original.dedup();
        let mut relabel = vec![usize::MAX; self.node_count];
        for (i, &v) in original.iter().enumerate() {
            if v >= self.node_count {
                return Err(GraphError::NodeOutOfRange {
                    node: v,
                    n: self.node_count,
                });
            }
            relabel[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| relabel[e.u] != usize::MAX && relabel[e.v] != usize::MAX)
            .map(|e| Edge {
                id: e.id,
                u: relabel[e.u],
                v: relabel[e.v],
            })
            .collect();
        Ok((
            MultiGraph::from_sorted_unchecked(original.len(), edges),
            original,
        ))
    }

    /// Spanning subgraph `(V, ids)` keeping node indices. Unknown IDs are ignored.
    pub fn edge_subgraph<'a>(&self, ids: impl IntoIterator<Item = &'a EdgeId>) -> MultiGraph {
        let mut edges: Vec<Edge> = ids
            .into_iter()
            .filter_map(|&id| self.edge(id).copied())
            .collect();
        edges.sort_unstable_by_key(|e| e.id);
        edges.dedup_by_key(|e| e.id);
        MultiGraph::from_sorted_unchecked(self.node_count, edges)
    }

    /// Cluster graph induced by `partition`: one node per cluster, and every
    /// edge crossing two distinct clusters kept with its original ID.
    ///
    /// Intra-cluster edges and edges touching unclustered nodes are dropped.
    /// The returned map sends each surviving edge ID to itself.
    pub fn cluster_graph(
        &self,
        partition: &Partition,
    ) -> Result<(MultiGraph, std::collections::BTreeMap<EdgeId, EdgeId>), GraphError> {
        if partition.node_count() != self.node_count {
            return Err(GraphError::InvalidPartition(format!(
                "partition covers {} nodes, graph has {}",
                partition.node_count(),
                self.node_count
            )));
        }
        let contracted = self.contract(partition.assignment(), partition.cluster_count());
        let map = contracted.edges.iter().map(|e| (e.id, e.id)).collect();
        Ok((contracted, map))
    }

    /// Contraction over a raw node → cluster table. No validation.
    pub(crate) fn contract(&self, cluster_of: &[Option<usize>], clusters: usize) -> MultiGraph {
        let edges = self
            .edges
            .iter()
            .filter_map(|e| match (cluster_of[e.u], cluster_of[e.v]) {
                (Some(a), Some(b)) if a != b => Some(Edge {
                    id: e.id,
                    u: a,
                    v: b,
                }),
                _ => None,
            })
            .collect();
        MultiGraph::from_sorted_unchecked(clusters, edges)
    }

    /// True if every node is reachable from node 0 (vacuously true for n ≤ 1).
    pub fn is_connected(&self) -> bool {
        if self.node_count <= 1 {
            return true;
        }
        bfs_distances(self, 0).iter().all(|d| d.is_some())
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.node_count];
        let mut out = Vec::new();
        for s in 0..self.node_count {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(x) = stack.pop() {
                comp.push(x);
                for &(y, _) in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Disjoint non-empty clusters over `0..n`; nodes outside every cluster are unclustered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    clusters: Vec<Vec<NodeId>>,
    assignment: Vec<Option<usize>>,
}

impl Partition {
    pub fn new(n: usize, clusters: Vec<Vec<NodeId>>) -> Result<Self, GraphError> {
        let mut assignment = vec![None; n];
        for (ci, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(GraphError::InvalidPartition(format!(
                    "cluster {ci} is empty"
                )));
            }
            for &v in cluster {
                if v >= n {
                    return Err(GraphError::InvalidPartition(format!(
                        "node {v} out of range for {n} nodes"
                    )));
                }
                if let Some(prev) = assignment[v] {
                    return Err(GraphError::InvalidPartition(format!(
                        "node {v} in clusters {prev} and {ci}"
                    )));
                }
                assignment[v] = Some(ci);
            }
        }
        Ok(Self {
            clusters,
            assignment,
        })
    }

    /// Every node in its own cluster.
    pub fn singletons(n: usize) -> Self {
        Self {
            clusters: (0..n).map(|v| vec![v]).collect(),
            assignment: (0..n).map(Some).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[Vec<NodeId>] {
        &self.clusters
    }

    pub fn cluster_of(&self, v: NodeId) -> Option<usize> {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn unclustered(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(v, _)| v)
    }
}
