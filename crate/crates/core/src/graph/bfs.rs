use std::collections::VecDeque;

use super::{GraphError, MultiGraph, NodeId};

/// Hop distance; `None` means unreachable.
pub type Distance = Option<usize>;

/// Exact unweighted hop distances from `source`.
pub fn bfs_distances(g: &MultiGraph, source: NodeId) -> Vec<Distance> {
    bfs_distances_within(g, source, usize::MAX)
}

/// BFS that stops expanding past `max_depth`; farther nodes report `None`.
pub fn bfs_distances_within(g: &MultiGraph, source: NodeId, max_depth: usize) -> Vec<Distance> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].unwrap();
        if d >= max_depth {
            continue;
        }
        for &(y, _) in g.incident(x) {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Largest pairwise hop distance; `Ok(None)` when disconnected.
pub fn diameter(g: &MultiGraph) -> Result<Distance, GraphError> {
    if g.node_count() == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut best = 0;
    for s in g.nodes() {
        for d in bfs_distances(g, s) {
            best = best.max(match d {
                Some(d) => d,
                None => return Ok(None),
            });
        }
    }
    Ok(Some(best))
}
