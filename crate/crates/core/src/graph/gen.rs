//! Random conflict-graph generators and topology transformations.

use rand::Rng;

use super::{ConflictGraph, GraphError, MultiChannelMap};
use crate::rng::rng_from;

/// Erdos-Renyi graph: each unordered pair is an edge independently with
/// probability `p`. Deterministic for a fixed seed.
pub fn gen_er(vertex_count: usize, p: f64, seed: u64) -> ConflictGraph {
    assert!((0.0..=1.0).contains(&p), "edge probability out of range");
    let mut rng = rng_from(seed);
    let mut edges = Vec::new();
    for i in 0..vertex_count {
        for j in i + 1..vertex_count {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::from_edges(vertex_count, edges).expect("generator produces valid edges")
}

/// Barabasi-Albert preferential attachment.
///
/// Seed core: a clique on the first `m` vertices (m(m-1)/2 edges). Each
/// later vertex attaches exactly `m` edges to distinct existing vertices,
/// chosen proportionally to degree (uniformly while all degrees are zero,
/// which only happens for m = 1).
pub fn gen_ba(vertex_count: usize, m: usize, seed: u64) -> Result<ConflictGraph, GraphError> {
    if m == 0 || m >= vertex_count {
        return Err(GraphError::BadAttachment { m, v: vertex_count });
    }
    let mut rng = rng_from(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // One entry per unit of degree; sampling from it is degree-proportional.
    let mut repeated: Vec<usize> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            edges.push((i, j));
            repeated.push(i);
            repeated.push(j);
        }
    }
    for v in m..vertex_count {
        let mut targets = Vec::with_capacity(m);
        while targets.len() < m {
            let t = if repeated.is_empty() {
                rng.random_range(0..v)
            } else {
                repeated[rng.random_range(0..repeated.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            repeated.push(t);
            repeated.push(v);
        }
    }
    ConflictGraph::from_edges(vertex_count, edges)
}

/// Expands a conflict graph to `k` sub-channels with frequency diversity.
///
/// Same-channel copies of a base edge are retained independently with
/// probability `retain_prob` per channel, and the `k` copies of each base
/// link form a clique so a single-radio link cannot occupy two channels.
pub fn multi_channel_graph(
    graph: &ConflictGraph,
    k: usize,
    retain_prob: f64,
    seed: u64,
) -> (ConflictGraph, MultiChannelMap) {
    multi_channel_graph_with(graph, k, retain_prob, true, seed)
}

/// Multi-channel expansion with the same-link clique behind a flag.
pub fn multi_channel_graph_with(
    graph: &ConflictGraph,
    k: usize,
    retain_prob: f64,
    same_link_clique: bool,
    seed: u64,
) -> (ConflictGraph, MultiChannelMap) {
    assert!(k >= 1, "need at least one channel");
    let v = graph.vertex_count();
    let map = MultiChannelMap::new(v, k);
    let mut rng = rng_from(seed);
    let mut edges = Vec::new();
    for ch in 0..k {
        for (a, b) in graph.edges() {
            if rng.random::<f64>() < retain_prob {
                edges.push((map.expanded_index(a, ch), map.expanded_index(b, ch)));
            }
        }
    }
    if same_link_clique {
        for link in 0..v {
            for c1 in 0..k {
                for c2 in c1 + 1..k {
                    edges.push((map.expanded_index(link, c1), map.expanded_index(link, c2)));
                }
            }
        }
    }
    let expanded = ConflictGraph::from_edges(map.expanded_count(), edges)
        .expect("expansion produces valid edges");
    (expanded, map)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PerturbStats {
    /// Edges replaced by a fresh absent pair.
    pub replaced: usize,
    /// Edges kept because no absent pair existed (complete graph).
    pub kept_no_candidate: usize,
}

/// Replaces each original edge independently with probability `prob` by a
/// uniformly random currently-absent pair. Vertex and edge counts are
/// preserved exactly.
pub fn perturb_edges(graph: &ConflictGraph, prob: f64, seed: u64) -> (ConflictGraph, PerturbStats) {
    use std::collections::BTreeSet;
    assert!((0.0..=1.0).contains(&prob));
    let v = graph.vertex_count();
    let mut rng = rng_from(seed);
    let mut present: BTreeSet<(usize, usize)> = graph.edges().collect();
    let originals: Vec<(usize, usize)> = graph.edges().collect();
    let total_pairs = v * v.saturating_sub(1) / 2;
    let mut stats = PerturbStats::default();
    for e in originals {
        if rng.random::<f64>() >= prob {
            continue;
        }
        present.remove(&e);
        // After removing e, e itself is absent; a "new" edge must differ from e.
        if total_pairs == present.len() + 1 {
            present.insert(e);
            stats.kept_no_candidate += 1;
            continue;
        }
        let replacement = loop {
            let a = rng.random_range(0..v);
            let b = rng.random_range(0..v);
            if a == b {
                continue;
            }
            let cand = (a.min(b), a.max(b));
            if cand != e && !present.contains(&cand) {
                break cand;
            }
        };
        present.insert(replacement);
        stats.replaced += 1;
    }
    let perturbed = ConflictGraph::from_edges(v, present).expect("set keeps edges unique");
    (perturbed, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        let empty = gen_er(5, 0.0, 1);
        assert_eq!(empty.edge_count(), 0);
        let complete = gen_er(5, 1.0, 1);
        assert_eq!(complete.edge_count(), 10);
    }

    #[test]
    fn er_deterministic_per_seed() {
        let a = gen_er(40, 0.2, 9);
        let b = gen_er(40, 0.2, 9);
        let c = gen_er(40, 0.2, 10);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn er_mean_edges_matches_expectation() {
        // E[E] = p V (V-1) / 2 = 495 for V=100, p=0.1
        let mean: f64 = (0..1000).map(|s| gen_er(100, 0.1, s).edge_count() as f64).sum::<f64>() / 1000.0;
        assert!((mean - 495.0).abs() <= 15.0, "mean edge count {mean}");
    }

    #[test]
    fn ba_two_vertices_single_edge() {
        let g = gen_ba(2, 1, 3).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn ba_m1_is_tree() {
        let g = gen_ba(50, 1, 7).unwrap();
        assert_eq!(g.edge_count(), 49);
        // connected + V-1 edges => tree
        let mut seen = [false; 50];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn ba_edge_count_follows_seed_core_convention() {
        // clique core on m vertices: E = (V - m) m + m(m-1)/2
        let g = gen_ba(100, 5, 11).unwrap();
        assert_eq!(g.edge_count(), 95 * 5 + 10);
    }

    #[test]
    fn ba_rejects_bad_m() {
        assert!(gen_ba(5, 5, 0).is_err());
        assert!(gen_ba(5, 0, 0).is_err());
    }

    #[test]
    fn generators_satisfy_invariants() {
        for seed in 0..1000 {
            gen_er(30, 0.15, seed).check_invariants().unwrap();
            gen_ba(30, 3, seed).unwrap().check_invariants().unwrap();
        }
    }

    #[test]
    fn multi_channel_k1_full_retain_is_identity() {
        let g = gen_er(12, 0.3, 5);
        let (x, map) = multi_channel_graph(&g, 1, 1.0, 0);
        assert_eq!(x, g);
        assert_eq!(map.expanded_count(), 12);
    }

    #[test]
    fn multi_channel_single_edge_two_channels() {
        // copies {v0_c0, v1_c0, v0_c1, v1_c1}: 2 same-channel + 2 same-link edges
        let g = ConflictGraph::from_edges(2, [(0, 1)]).unwrap();
        let (x, map) = multi_channel_graph(&g, 2, 1.0, 0);
        assert_eq!(x.vertex_count(), 4);
        assert_eq!(x.edge_count(), 4);
        assert!(x.has_edge(map.expanded_index(0, 0), map.expanded_index(1, 0)));
        assert!(x.has_edge(map.expanded_index(0, 1), map.expanded_index(1, 1)));
        assert!(x.has_edge(map.expanded_index(0, 0), map.expanded_index(0, 1)));
        assert!(x.has_edge(map.expanded_index(1, 0), map.expanded_index(1, 1)));
    }

    #[test]
    fn multi_channel_retention_rate() {
        // expected same-channel edges: retain * K * E = 2.4 E
        let g = gen_er(30, 0.3, 2);
        let e = g.edge_count() as f64;
        let mut total = 0usize;
        let n = 200;
        for seed in 0..n {
            let (x, _) = multi_channel_graph(&g, 3, 0.8, seed);
            let clique_edges = 3 * g.vertex_count(); // K(K-1)/2 per link = 3
            total += x.edge_count() - clique_edges;
        }
        let mean = total as f64 / n as f64;
        assert!((mean - 2.4 * e).abs() < 0.1 * e, "mean same-channel edges {mean} vs {}", 2.4 * e);
    }

    #[test]
    fn multi_channel_same_link_cliques_present() {
        let g = gen_er(10, 0.4, 3);
        let (x, map) = multi_channel_graph(&g, 3, 0.5, 4);
        assert_eq!(x.vertex_count(), 30);
        for link in 0..10 {
            for c1 in 0..3 {
                for c2 in c1 + 1..3 {
                    assert!(x.has_edge(map.expanded_index(link, c1), map.expanded_index(link, c2)));
                }
            }
        }
    }

    #[test]
    fn perturb_zero_prob_is_identity() {
        let g = gen_er(20, 0.2, 6);
        let (p, stats) = perturb_edges(&g, 0.0, 1);
        assert_eq!(p, g);
        assert_eq!(stats, PerturbStats::default());
    }

    #[test]
    fn perturb_preserves_counts() {
        let g = gen_er(25, 0.25, 8);
        for prob in [0.1, 0.5, 1.0] {
            let (p, _) = perturb_edges(&g, prob, 42);
            assert_eq!(p.vertex_count(), g.vertex_count());
            assert_eq!(p.edge_count(), g.edge_count());
            p.check_invariants().unwrap();
        }
    }

    #[test]
    fn perturb_five_cycle_full() {
        let g = ConflictGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let (p, stats) = perturb_edges(&g, 1.0, 13);
        assert_eq!(p.edge_count(), 5);
        // replaced edges differ from the one they replaced, so the edit
        // distance (#replaced)/E is consistent with the surviving overlap
        let shared = g.edges().filter(|&(a, b)| p.has_edge(a, b)).count();
        assert!(stats.replaced >= 5 - shared);
        assert_eq!(stats.replaced + stats.kept_no_candidate, 5);
    }

    #[test]
    fn perturb_complete_graph_keeps_edges() {
        let g = gen_er(5, 1.0, 0);
        let (p, stats) = perturb_edges(&g, 1.0, 3);
        assert_eq!(p, g);
        assert_eq!(stats.kept_no_candidate, 10);
    }
}
