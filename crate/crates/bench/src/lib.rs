//! Shared inputs for the benchmarks.

use spansim_core::{generate, MultiGraph, Params};

/// `G(n, p)` with a fixed graph seed.
pub fn gnp(n: usize, p: f64) -> MultiGraph {
    generate::gnp(n, p, 0)
}

/// Default parameters: `h = ceil(log2 n)`, `c = 4`.
pub fn params(g: &MultiGraph, k: u32, budget_scale: f64) -> Params {
    let n = g.node_count();
    let h = (n.max(2) as f64).log2().ceil() as u32;
    Params::new(n, k, h, 4.0, 0)
        .and_then(|p| p.with_budget_scale(budget_scale))
        .expect("valid benchmark parameters")
}
