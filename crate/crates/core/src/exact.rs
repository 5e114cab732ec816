//! Exact MWIS solver: branch and bound over bitset residuals with a greedy
//! weighted clique-cover upper bound, plus approximation-ratio scoring.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::ConflictGraph;
use crate::greedy::{cgs, SolveResult};

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("reference result does not carry the optimality flag")]
    NotOptimal,
}

/// Exploration budget; exceeding it returns the best solution found so far
/// with the optimality flag unset.
#[derive(Debug, Clone, Copy)]
pub struct ExactBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for ExactBudget {
    fn default() -> Self {
        ExactBudget { node_limit: 20_000_000, time_limit: Duration::from_secs(30) }
    }
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub result: SolveResult,
    /// Set when the search space was exhausted, i.e. the result is optimal.
    pub optimal: bool,
    /// Branch-and-bound nodes explored.
    pub nodes: u64,
}

/// Fixed-width bitset over graph vertices.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn full(n: usize) -> Self {
        let words = n.div_ceil(64);
        let mut v = vec![u64::MAX; words];
        if !n.is_multiple_of(64) {
            if let Some(last) = v.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        if n == 0 {
            v.clear();
        }
        Bits(v)
    }

    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn count_and(&self, other: &Bits) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * 64 + tz)
                }
            })
        })
    }
}

struct Solver<'a> {
    adj: Vec<Bits>,
    weights: &'a [f64],
    /// vertices sorted by weight descending (for the clique cover)
    by_weight: Vec<usize>,
    incumbent_value: f64,
    incumbent: Bits,
    nodes: u64,
    node_limit: u64,
    deadline: Instant,
    exhausted: bool,
}

impl Solver<'_> {
    /// Greedy weighted clique cover of the residual: any independent set takes
    /// at most one vertex per clique, and processing vertices in descending
    /// weight makes each clique's first member its heaviest, so the sum of
    /// first-member weights bounds the best completion from above.
    fn upper_bound(&self, residual: &Bits) -> f64 {
        let mut cliques: Vec<Bits> = Vec::new();
        let mut bound = 0.0;
        for &v in &self.by_weight {
            if !residual.get(v) {
                continue;
            }
            let mut placed = false;
            for clique in cliques.iter_mut() {
                if clique.is_subset_of(&self.adj[v]) {
                    clique.set(v);
                    placed = true;
                    break;
                }
            }
            if !placed {
                let mut c = Bits::empty(self.weights.len());
                c.set(v);
                cliques.push(c);
                bound += self.weights[v].max(0.0);
            }
        }
        bound
    }

    fn branch(&mut self, residual: Bits, current: f64, chosen: &mut Bits) {
        self.nodes += 1;
        if self.nodes >= self.node_limit || (self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline)
        {
            self.exhausted = false;
            return;
        }
        // highest-degree residual vertex first; none left means every
        // remaining vertex is isolated and joins the solution
        let mut best_v = None;
        let mut best_deg = 0;
        for v in residual.iter_ones() {
            let d = self.adj[v].count_and(&residual);
            if best_v.is_none() || d > best_deg {
                best_v = Some(v);
                best_deg = d;
            }
        }
        let Some(v) = best_v else {
            if current > self.incumbent_value {
                self.incumbent_value = current;
                self.incumbent = chosen.clone();
            }
            return;
        };
        if best_deg == 0 {
            let gain: f64 = residual.iter_ones().map(|u| self.weights[u].max(0.0)).sum();
            if current + gain > self.incumbent_value {
                self.incumbent_value = current + gain;
                let mut sol = chosen.clone();
                for u in residual.iter_ones() {
                    if self.weights[u] >= 0.0 {
                        sol.set(u);
                    }
                }
                self.incumbent = sol;
            }
            return;
        }
        if current + self.upper_bound(&residual) <= self.incumbent_value + 1e-12 {
            return;
        }
        // include v first: tightens the incumbent sooner
        {
            let mut r = residual.clone();
            r.clear(v);
            r.and_not_assign(&self.adj[v]);
            chosen.set(v);
            self.branch(r, current + self.weights[v], chosen);
            chosen.clear(v);
        }
        {
            let mut r = residual;
            r.clear(v);
            self.branch(r, current, chosen);
        }
    }
}

/// Exact MWIS by branch and bound; the incumbent is seeded with the greedy
/// solution. Deterministic for fixed inputs. Weights are assumed non-negative
/// (the experiment distributions guarantee it).
pub fn mwis_exact(graph: &ConflictGraph, weights: &[f64], budget: ExactBudget) -> ExactResult {
    assert_eq!(weights.len(), graph.vertex_count());
    assert!(budget.node_limit > 0 && budget.time_limit > Duration::ZERO, "budget must be positive");
    let start = Instant::now();
    let n = graph.vertex_count();
    let adj: Vec<Bits> = (0..n)
        .map(|v| {
            let mut b = Bits::empty(n);
            for &u in graph.neighbors(v) {
                b.set(u);
            }
            b
        })
        .collect();
    let mut by_weight: Vec<usize> = (0..n).collect();
    by_weight.sort_by(|&a, &b| weights[b].partial_cmp(&weights[a]).unwrap().then(a.cmp(&b)));

    let seed = cgs(graph, weights);
    let mut incumbent = Bits::empty(n);
    for &v in &seed.solution {
        incumbent.set(v);
    }
    let mut solver = Solver {
        adj,
        weights,
        by_weight,
        incumbent_value: seed.utility,
        incumbent,
        nodes: 0,
        node_limit: budget.node_limit,
        deadline: start + budget.time_limit,
        exhausted: true,
    };
    let mut chosen = Bits::empty(n);
    solver.branch(Bits::full(n), 0.0, &mut chosen);

    let solution: Vec<usize> = solver.incumbent.iter_ones().collect();
    debug_assert!(graph.is_independent_set(&solution));
    ExactResult {
        result: SolveResult {
            utility: solver.incumbent_value,
            rounds: 0,
            messages: 0,
            elapsed: start.elapsed().as_secs_f64(),
            solution,
        },
        optimal: solver.exhausted,
        nodes: solver.nodes,
    }
}

/// Approximation ratio u(solution) / u(optimum), with the empty-instance
/// convention AR = 1 when the optimal utility is zero.
pub fn approximation_ratio(solution: &SolveResult, optimum: &ExactResult) -> Result<f64, ExactError> {
    if !optimum.optimal {
        return Err(ExactError::NotOptimal);
    }
    if optimum.result.utility == 0.0 {
        return Ok(1.0);
    }
    Ok(solution.utility / optimum.result.utility)
}
