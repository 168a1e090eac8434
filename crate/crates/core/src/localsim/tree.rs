use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, NodeId};

/// Rooted spanning tree of one cluster, over original graph nodes.
///
/// The root hosts the cluster's virtual node. Every tree edge is an original
/// edge already selected into the spanner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterTree {
    root: NodeId,
    /// child → (parent, edge)
    parent: BTreeMap<NodeId, (NodeId, EdgeId)>,
}

impl ClusterTree {
    pub fn singleton(root: NodeId) -> Self {
        Self {
            root,
            parent: BTreeMap::new(),
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Parent link of `x`, or `None` for the root (or a non-member).
    pub fn parent(&self, x: NodeId) -> Option<(NodeId, EdgeId)> {
        self.parent.get(&x).copied()
    }

    pub fn contains(&self, x: NodeId) -> bool {
        x == self.root || self.parent.contains_key(&x)
    }

    /// Members in increasing order.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.parent.keys().copied().collect();
        let at = out.partition_point(|&x| x < self.root);
        out.insert(at, self.root);
        out
    }

    /// `(child, parent, edge)` for every tree edge, ordered by child.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, EdgeId)> + '_ {
        self.parent.iter().map(|(&c, &(p, e))| (c, p, e))
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len()
    }

    /// Children lists keyed by parent, each sorted by child.
    pub fn children(&self) -> BTreeMap<NodeId, Vec<(NodeId, EdgeId)>> {
        let mut out: BTreeMap<NodeId, Vec<(NodeId, EdgeId)>> = BTreeMap::new();
        for (&c, &(p, e)) in &self.parent {
            out.entry(p).or_default().push((c, e));
        }
        out
    }

    /// Depth of every member (root at 0).
    pub fn depths(&self) -> BTreeMap<NodeId, usize> {
        let mut depth = BTreeMap::from([(self.root, 0)]);
        for &start in self.parent.keys() {
            let mut chain = Vec::new();
            let mut x = start;
            while !depth.contains_key(&x) {
                chain.push(x);
                x = self.parent[&x].0;
            }
            let mut d = depth[&x];
            for y in chain.into_iter().rev() {
                d += 1;
                depth.insert(y, d);
            }
        }
        depth
    }

    pub fn height(&self) -> usize {
        self.depths().values().copied().max().unwrap_or(0)
    }

    /// Same tree rooted at `new_root`. Panics if `new_root` is not a member.
    pub fn rerooted(&self, new_root: NodeId) -> Self {
        assert!(self.contains(new_root), "node {new_root} not in tree");
        let mut parent = self.parent.clone();
        // flip the links along new_root → old root
        let mut x = new_root;
        let mut carried: Option<(NodeId, EdgeId)> = None;
        loop {
            let up = parent.remove(&x);
            if let Some(link) = carried {
                parent.insert(x, link);
            }
            match up {
                Some((p, e)) => {
                    carried = Some((x, e));
                    x = p;
                }
                None => break,
            }
        }
        Self {
            root: new_root,
            parent,
        }
    }

    /// Hangs `subtree` below member `at` through tree edge `edge`.
    pub fn attach(&mut self, subtree: ClusterTree, at: NodeId, edge: EdgeId) {
        assert!(self.contains(at), "attach point {at} not in tree");
        let ClusterTree { root, parent } = subtree;
        assert!(!self.contains(root), "subtree root {root} already in tree");
        self.parent.insert(root, (at, edge));
        for (c, link) in parent {
            let clash = self.parent.insert(c, link);
            assert!(clash.is_none() && c != self.root, "trees overlap at {c}");
        }
    }
}
