//! Graph generators for experiments and tests.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, MultiGraph, NodeId};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("invalid parameters for {model}: {msg}")]
    InvalidParams { model: &'static str, msg: String },
}

/// A supported random or structured graph family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum GraphModel {
    /// Erdős–Rényi G(n, p); only the largest connected component is kept.
    Gnp {
        n: usize,
        p: f64,
    },
    Complete {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Path {
        n: usize,
    },
    Grid {
        rows: usize,
        cols: usize,
    },
    /// Hub 0 joined to `n - 1` leaves.
    Star {
        n: usize,
    },
    /// Two `clique`-node complete graphs joined by a path through `bridge` extra nodes.
    Barbell {
        clique: usize,
        bridge: usize,
    },
}

impl GraphModel {
    pub fn name(&self) -> &'static str {
        match self {
            GraphModel::Gnp { .. } => "gnp",
            GraphModel::Complete { .. } => "complete",
            GraphModel::Cycle { .. } => "cycle",
            GraphModel::Path { .. } => "path",
            GraphModel::Grid { .. } => "grid",
            GraphModel::Star { .. } => "star",
            GraphModel::Barbell { .. } => "barbell",
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphModel::Gnp { n, p } => write!(f, "gnp n={n} p={p}"),
            GraphModel::Complete { n } => write!(f, "complete n={n}"),
            GraphModel::Cycle { n } => write!(f, "cycle n={n}"),
            GraphModel::Path { n } => write!(f, "path n={n}"),
            GraphModel::Grid { rows, cols } => write!(f, "grid rows={rows} cols={cols}"),
            GraphModel::Star { n } => write!(f, "star n={n}"),
            GraphModel::Barbell { clique, bridge } => {
                write!(f, "barbell clique={clique} bridge={bridge}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedGraph {
    pub graph: MultiGraph,
    pub model: GraphModel,
    pub seed: u64,
    /// Set when a gnp draw was disconnected: node count before trimming.
    pub trimmed_from: Option<usize>,
}

impl GeneratedGraph {
    /// Header comments describing how the graph was produced.
    pub fn comments(&self) -> Vec<String> {
        let mut out = vec![format!("{} seed={}", self.model, self.seed)];
        if let Some(orig) = self.trimmed_from {
            out.push(format!(
                "largest component kept: {} of {} nodes",
                self.graph.node_count(),
                orig
            ));
        }
        out
    }
}

pub fn generate(model: GraphModel, seed: u64) -> Result<GeneratedGraph, GenerateError> {
    let invalid = |msg: &str| GenerateError::InvalidParams {
        model: model.name(),
        msg: msg.to_string(),
    };
    let mut trimmed_from = None;
    let graph = match model {
        GraphModel::Gnp { n, p } => {
            if n == 0 {
                return Err(invalid("n must be positive"));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid("p must lie in [0, 1]"));
            }
            let g = gnp(n, p, seed);
            let (g, trimmed) = largest_component(&g);
            if trimmed {
                trimmed_from = Some(n);
            }
            g
        }
        GraphModel::Complete { n } if n >= 1 => complete(n),
        GraphModel::Cycle { n } if n >= 3 => cycle(n),
        GraphModel::Path { n } if n >= 1 => path(n),
        GraphModel::Grid { rows, cols } if rows >= 1 && cols >= 1 => grid(rows, cols),
        GraphModel::Star { n } if n >= 1 => star(n),
        GraphModel::Barbell { clique, bridge } if clique >= 1 => barbell(clique, bridge),
        GraphModel::Cycle { .. } => return Err(invalid("a cycle needs at least 3 nodes")),
        _ => return Err(invalid("sizes must be positive")),
    };
    Ok(GeneratedGraph {
        graph,
        model,
        seed,
        trimmed_from,
    })
}

fn sequential(n: usize, pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> MultiGraph {
    MultiGraph::from_pairs(n, pairs).expect("generator produced a valid edge list")
}

/// Raw G(n, p) draw without component trimming.
pub fn gnp(n: usize, p: f64, seed: u64) -> MultiGraph {
    let mut rng = rng::seeded(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    sequential(n, pairs)
}

pub fn complete(n: usize) -> MultiGraph {
    sequential(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn cycle(n: usize) -> MultiGraph {
    sequential(n, (0..n).map(|u| (u, (u + 1) % n)))
}

pub fn path(n: usize) -> MultiGraph {
    sequential(n, (1..n).map(|u| (u - 1, u)))
}

/// `rows × cols` grid; node `(r, c)` has index `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> MultiGraph {
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                pairs.push((v, v + 1));
            }
            if r + 1 < rows {
                pairs.push((v, v + cols));
            }
        }
    }
    sequential(rows * cols, pairs)
}

pub fn star(n: usize) -> MultiGraph {
    sequential(n, (1..n).map(|v| (0, v)))
}

pub fn barbell(clique: usize, bridge: usize) -> MultiGraph {
    let n = 2 * clique + bridge;
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    for offset in [0, clique + bridge] {
        for u in 0..clique {
            for v in u + 1..clique {
                pairs.push((offset + u, offset + v));
            }
        }
    }
    // clique-A's last node, the bridge nodes, clique-B's first node
    let chain: Vec<NodeId> = (clique - 1..=clique + bridge).collect();
    pairs.extend(chain.windows(2).map(|w| (w[0], w[1])));
    sequential(n, pairs)
}

/// Largest connected component relabeled densely, with edge IDs reassigned in order.
/// The flag reports whether anything was dropped.
pub fn largest_component(g: &MultiGraph) -> (MultiGraph, bool) {
    let comps = g.components();
    let Some(best) = comps
        .iter()
        .max_by_key(|c| (c.len(), std::cmp::Reverse(c[0])))
    else {
        return (g.clone(), false);
    };
    if best.len() == g.node_count() {
        return (g.clone(), false);
    }
    let mut relabel = vec![usize::MAX; g.node_count()];
    for (i, &v) in best.iter().enumerate() {
        relabel[v] = i;
    }
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| relabel[e.u] != usize::MAX)
        .enumerate()
        .map(|(i, e)| Edge {
            id: i as u64,
            u: relabel[e.u],
            v: relabel[e.v],
        })
        .collect();
    (
        MultiGraph::from_edges(best.len(), edges).expect("relabeled component is valid"),
        true,
    )
}
