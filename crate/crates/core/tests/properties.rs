//! Randomized invariants over generated graphs and solver pipelines.

use linksched_core::graph::{
    gen_er, load_graph, multi_channel_graph, perturb_edges, save_graph, VertexWeights,
};
use linksched_core::greedy::{cgs, lgs};
use linksched_core::search::SearchNode;
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = linksched_core::ConflictGraph> {
    (0usize..40, 0.0f64..1.0, any::<u64>()).prop_map(|(v, p, seed)| gen_er(v, p, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_file_round_trip_is_identity(graph in arb_graph(), wseed in any::<u64>()) {
        let weights = VertexWeights::uniform(graph.vertex_count(), wseed);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        save_graph(&path, &graph, &weights).unwrap();
        let (g2, w2) = load_graph(&path).unwrap();
        prop_assert_eq!(&graph, &g2);
        prop_assert_eq!(weights.values(), w2.values());
    }

    #[test]
    fn perturbation_preserves_counts(graph in arb_graph(), prob in 0.0f64..=1.0, seed in any::<u64>()) {
        let (p, _) = perturb_edges(&graph, prob, seed);
        prop_assert_eq!(p.vertex_count(), graph.vertex_count());
        prop_assert_eq!(p.edge_count(), graph.edge_count());
        p.check_invariants().unwrap();
    }

    #[test]
    fn multi_channel_counts_and_cliques(graph in arb_graph(), k in 1usize..4, seed in any::<u64>()) {
        let (x, map) = multi_channel_graph(&graph, k, 0.5, seed);
        prop_assert_eq!(x.vertex_count(), k * graph.vertex_count());
        for link in 0..graph.vertex_count() {
            for c1 in 0..k {
                for c2 in c1 + 1..k {
                    prop_assert!(x.has_edge(map.expanded_index(link, c1), map.expanded_index(link, c2)));
                }
            }
        }
    }

    #[test]
    fn greedy_solvers_give_equal_maximal_independent_sets(graph in arb_graph(), wseed in any::<u64>()) {
        let w = VertexWeights::uniform(graph.vertex_count(), wseed);
        let a = cgs(&graph, &w);
        let b = lgs(&graph, &w, None);
        prop_assert!(graph.is_independent_set(&a.solution));
        prop_assert_eq!(&a.solution, &b.solution);
        // maximal: nothing outside the solution is free of conflicts
        let mut blocked = vec![false; graph.vertex_count()];
        for &v in &a.solution {
            blocked[v] = true;
            for &n in graph.neighbors(v) {
                blocked[n] = true;
            }
        }
        prop_assert!(blocked.iter().all(|&x| x));
    }

    #[test]
    fn expand_chains_keep_partial_solutions_independent(
        graph in arb_graph(),
        picks in proptest::collection::vec(any::<u32>(), 0..40),
    ) {
        let mut node = SearchNode::root(&graph);
        for pick in picks {
            if node.is_terminal() {
                break;
            }
            let residual: Vec<usize> =
                (0..graph.vertex_count()).filter(|&v| node.contains(v)).collect();
            let v = residual[pick as usize % residual.len()];
            node = node.expand(&graph, v).unwrap();
            prop_assert!(graph.is_independent_set(node.partial_solution()));
        }
    }
}
