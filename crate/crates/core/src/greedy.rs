//! Centralized and local (distributed) greedy MWIS solvers.

use std::time::Instant;

use crate::graph::ConflictGraph;

/// Outcome of one solver call.
///
/// `rounds` counts synchronous rounds of local exchange between conflict-graph
/// neighbors; `messages` counts control broadcasts (one per selected vertex).
/// `utility` is the weight sum of the solution under the weights the solver
/// was given.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Selected vertices, ascending.
    pub solution: Vec<usize>,
    pub utility: f64,
    pub rounds: usize,
    pub messages: usize,
    /// Wall time of the call in seconds.
    pub elapsed: f64,
}

impl SolveResult {
    pub fn empty() -> Self {
        SolveResult { solution: Vec::new(), utility: 0.0, rounds: 0, messages: 0, elapsed: 0.0 }
    }
}

/// Sum of `weights` over `solution`.
pub fn utility_of(weights: &[f64], solution: &[usize]) -> f64 {
    // + 0.0 normalizes the empty sum's -0.0
    solution.iter().map(|&v| weights[v]).sum::<f64>() + 0.0
}

/// `a` at vertex `va` beats `b` at `vb` under the deterministic tie rule:
/// strictly greater weight, or equal weight and lower vertex index.
#[inline]
fn beats(a: f64, va: usize, b: f64, vb: usize) -> bool {
    a > b || (a == b && va < vb)
}

/// Centralized greedy solver: repeatedly take the largest-utility vertex and
/// delete its neighbors until no vertex remains. Deterministic; ties go to
/// the lower index.
pub fn cgs(graph: &ConflictGraph, weights: &[f64]) -> SolveResult {
    assert_eq!(weights.len(), graph.vertex_count());
    let start = Instant::now();
    let mut order: Vec<usize> = (0..graph.vertex_count()).collect();
    order.sort_by(|&a, &b| {
        weights[b].partial_cmp(&weights[a]).expect("finite weights").then(a.cmp(&b))
    });
    let mut removed = vec![false; graph.vertex_count()];
    let mut solution = Vec::new();
    for v in order {
        if removed[v] {
            continue;
        }
        solution.push(v);
        removed[v] = true;
        for &u in graph.neighbors(v) {
            removed[u] = true;
        }
    }
    solution.sort_unstable();
    let utility = utility_of(weights, &solution);
    SolveResult {
        utility,
        rounds: solution.len(),
        messages: 0,
        elapsed: start.elapsed().as_secs_f64(),
        solution,
    }
}

/// One synchronous LGS round over the residual graph induced by `alive`.
///
/// Every vertex that beats all of its alive neighbors is selected; selected
/// vertices and their neighbors leave the residual set. Returns the winners
/// and whether the residual graph had any edge (i.e., whether losers had to
/// be notified by a control broadcast).
pub(crate) fn lgs_round(graph: &ConflictGraph, weights: &[f64], alive: &mut [bool]) -> (Vec<usize>, bool) {
    let mut winners = Vec::new();
    let mut contended = false;
    for v in 0..graph.vertex_count() {
        if !alive[v] {
            continue;
        }
        let mut wins = true;
        for &u in graph.neighbors(v) {
            if alive[u] {
                contended = true;
                if !beats(weights[v], v, weights[u], u) {
                    wins = false;
                    break;
                }
            }
        }
        if wins {
            winners.push(v);
        }
    }
    for &v in &winners {
        alive[v] = false;
        for &u in graph.neighbors(v) {
            alive[u] = false;
        }
    }
    (winners, contended)
}

/// Local greedy solver: synchronous rounds in which every local weight
/// maximum joins the solution and broadcasts, removing its neighbors.
///
/// Round accounting: each iteration spends one round exchanging weights with
/// neighbors, plus one broadcast round whenever the residual graph still has
/// an edge (losers must hear the control message before the next exchange).
/// On the increasing-weight path this costs exactly V rounds, the documented
/// worst case.
pub fn lgs(graph: &ConflictGraph, weights: &[f64], max_rounds: Option<usize>) -> SolveResult {
    assert_eq!(weights.len(), graph.vertex_count());
    let start = Instant::now();
    let limit = max_rounds.unwrap_or(usize::MAX);
    let mut alive = vec![true; graph.vertex_count()];
    let mut solution = Vec::new();
    let mut rounds = 0;
    let mut remaining = graph.vertex_count();
    while remaining > 0 && rounds < limit {
        let before = remaining;
        let (winners, contended) = lgs_round(graph, weights, &mut alive);
        assert!(
            !winners.is_empty(),
            "no local maximum found; weights must be finite to order vertices"
        );
        rounds += 1; // weight exchange
        if contended && rounds < limit {
            rounds += 1; // losers hear the control broadcast
        }
        solution.extend_from_slice(&winners);
        remaining = alive.iter().filter(|&&a| a).count();
        debug_assert!(remaining < before, "residual must shrink every round");
    }
    solution.sort_unstable();
    let utility = utility_of(weights, &solution);
    SolveResult {
        utility,
        rounds,
        messages: solution.len(),
        elapsed: start.elapsed().as_secs_f64(),
        solution,
    }
}

/// LGS truncated to at most `n` rounds; the solution may be non-maximal but
/// is always independent.
pub fn lgs_truncated(graph: &ConflictGraph, weights: &[f64], n: usize) -> SolveResult {
    assert!(n >= 1);
    lgs(graph, weights, Some(n))
}
