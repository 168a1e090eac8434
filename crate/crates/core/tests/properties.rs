use proptest::prelude::*;
use spansim_core::broadcast::{run_and_check, BroadcastInstance};
use spansim_core::graph::{parse_graph, write_graph};
use spansim_core::verify::{check_cluster_diameters, check_partition, check_stretch};
use spansim_core::{run_distributed_sampler, sampler, MultiGraph, Params};

/// Random multigraphs: parallel edges allowed, no self-loops.
fn multigraph() -> impl Strategy<Value = MultiGraph> {
    (2usize..40).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..(3 * n)).prop_map(move |pairs| {
            let pairs = pairs.into_iter().filter(|(u, v)| u != v);
            MultiGraph::from_pairs(n, pairs).unwrap()
        })
    })
}

/// Stretch holds whenever every heavy node found a center; a heavy node left
/// unclustered drops its unexplored edges, which the center probability makes
/// unlikely at faithful constants but not impossible at the small ones used here.
fn all_heavy_clustered(r: &spansim_core::SamplerRun) -> bool {
    r.result.failures.is_empty() && r.result.levels.iter().all(|l| l.heavy_unclustered == 0)
}

/// Small budgets and thresholds so that spanners are sparser than the graph.
fn params(n: usize) -> impl Strategy<Value = Params> {
    (
        1u32..=2,
        1u32..=4,
        0.05f64..2.0,
        0.001f64..0.2,
        any::<u64>(),
    )
        .prop_map(move |(k, h, c, scale, seed)| {
            Params::new(n, k, h, c, seed)
                .unwrap()
                .with_budget_scale(scale)
                .unwrap()
        })
}

fn graph_and_params() -> impl Strategy<Value = (MultiGraph, Params)> {
    multigraph().prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), params(n))
    })
}

fn component_labels(g: &MultiGraph) -> Vec<usize> {
    let mut label = vec![0; g.node_count()];
    for (i, comp) in g.components().iter().enumerate() {
        for &v in comp {
            label[v] = i;
        }
    }
    label
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(g in multigraph()) {
        let text = write_graph(&g, &["generated".to_string()]);
        let back = parse_graph(&text).unwrap();
        prop_assert!(back == g);
    }

    #[test]
    fn degrees_sum_to_twice_edges(g in multigraph()) {
        let total: usize = g.nodes().map(|v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn spanner_is_a_sorted_subset((g, p) in graph_and_params()) {
        let run = sampler(&g, &p).unwrap();
        let s = &run.result.spanner_edges;
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(s.iter().all(|&e| g.contains_edge(e)));
    }

    #[test]
    fn clusters_partition_and_stay_small((g, p) in graph_and_params()) {
        let run = sampler(&g, &p).unwrap();
        let part = check_partition(&run.assignment, g.node_count());
        prop_assert!(part.ok, "offenders {:?}", part.offenders);
        let diam = check_cluster_diameters(&g, &run.result.spanner_edges, &run.assignment);
        prop_assert!(diam.violations.is_empty(), "{:?}", diam.violations);
    }

    #[test]
    fn stretch_and_connectivity_without_failures((g, p) in graph_and_params()) {
        let run = sampler(&g, &p).unwrap();
        prop_assume!(all_heavy_clustered(&run));
        let check = check_stretch(&g, &run.result.spanner_edges, p.stretch_bound());
        prop_assert!(check.violations.is_empty(), "{:?}", check.violations);
        let h = run.result.subgraph(&g);
        prop_assert_eq!(component_labels(&h), component_labels(&g));
    }

    #[test]
    fn sampler_is_deterministic((g, p) in graph_and_params()) {
        let a = sampler(&g, &p).unwrap();
        let b = sampler(&g, &p).unwrap();
        prop_assert_eq!(a.result, b.result);
        prop_assert_eq!(a.assignment, b.assignment);
    }

    #[test]
    fn distributed_matches_centralized((g, p) in graph_and_params()) {
        let c = sampler(&g, &p).unwrap();
        let d = run_distributed_sampler(&g, &p).unwrap();
        // the distributed views only stay exact while no heavy node is left unclustered
        prop_assume!(all_heavy_clustered(&c));
        prop_assert_eq!(&c.result, &d.result);
        prop_assert_eq!(&c.assignment, &d.assignment);
    }

    #[test]
    fn distributed_output_is_well_formed((g, p) in graph_and_params()) {
        let d = run_distributed_sampler(&g, &p).unwrap();
        prop_assert!(d.result.spanner_edges.iter().all(|&e| g.contains_edge(e)));
        prop_assert!(check_partition(&d.assignment, g.node_count()).ok);
        let diam = check_cluster_diameters(&g, &d.result.spanner_edges, &d.assignment);
        prop_assert!(diam.violations.is_empty());
    }

    #[test]
    fn broadcast_reaches_t_neighborhood((g, p) in graph_and_params(), t in 0u32..3) {
        let run = sampler(&g, &p).unwrap();
        prop_assume!(all_heavy_clustered(&run));
        let inst = BroadcastInstance::new(g.node_count(), t, &run.result);
        let report = run_and_check(&g, &inst);
        prop_assert!(report.misses.is_empty(), "{:?}", report.misses);
        prop_assert_eq!(report.rounds, inst.alpha * u64::from(t));
    }
}
