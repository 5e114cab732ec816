//! GCN-guided centralized MWIS solvers sharing one search-tree state machine:
//! rollout search (one root-to-terminal traversal scored by 1-step lookahead),
//! greedy Q-search (argmax of the embedding), and random tree search with
//! backtracking and a timeout.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::Rng;
use thiserror::Error;

use crate::gcn::{features_column, forward, forward_crts, GcnError, GcnModel, OutputKind};
use crate::graph::ConflictGraph;
use crate::greedy::{cgs, utility_of, SolveResult};
use crate::rng::{rng_from, subseed};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("vertex {0} is not in the residual graph")]
    NotResidual(usize),
    #[error("model not usable: {0}")]
    Model(#[from] GcnError),
    #[error("branching factor {cfg} does not match model branches {model}")]
    BranchMismatch { cfg: usize, model: usize },
}

/// Search-tree node: residual graph (as a mask over the base vertices),
/// partial solution, and the excluded neighborhood of the partial solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchNode {
    residual: Vec<bool>,
    residual_count: usize,
    partial: Vec<usize>,
    excluded: Vec<bool>,
}

impl SearchNode {
    pub fn root(graph: &ConflictGraph) -> Self {
        let v = graph.vertex_count();
        SearchNode {
            residual: vec![true; v],
            residual_count: v,
            partial: Vec::new(),
            excluded: vec![false; v],
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.residual_count == 0
    }

    pub fn residual_mask(&self) -> &[bool] {
        &self.residual
    }

    pub fn residual_count(&self) -> usize {
        self.residual_count
    }

    pub fn partial_solution(&self) -> &[usize] {
        &self.partial
    }

    pub fn contains(&self, v: usize) -> bool {
        self.residual[v]
    }

    pub fn is_excluded(&self, v: usize) -> bool {
        self.excluded[v]
    }

    /// Child state from selecting `v`: the residual loses v and its
    /// neighborhood, the partial solution gains v.
    pub fn expand(&self, graph: &ConflictGraph, v: usize) -> Result<SearchNode, SearchError> {
        if v >= self.residual.len() || !self.residual[v] {
            return Err(SearchError::NotResidual(v));
        }
        let mut child = self.clone();
        child.residual[v] = false;
        child.residual_count -= 1;
        for &u in graph.neighbors(v) {
            if child.residual[u] {
                child.residual[u] = false;
                child.residual_count -= 1;
            }
            child.excluded[u] = true;
        }
        child.partial.push(v);
        Ok(child)
    }

    /// Sibling state that skips `v`: the residual loses v but the partial
    /// solution does not gain it. Used as a backtrack point; with skip
    /// states pushed at every step the search enumerates the whole
    /// include/exclude tree.
    pub fn skip(&self, v: usize) -> Result<SearchNode, SearchError> {
        if v >= self.residual.len() || !self.residual[v] {
            return Err(SearchError::NotResidual(v));
        }
        let mut sibling = self.clone();
        sibling.residual[v] = false;
        sibling.residual_count -= 1;
        Ok(sibling)
    }

    fn into_result(mut self, weights: &[f64], start: Instant, steps: usize) -> SolveResult {
        self.partial.sort_unstable();
        SolveResult {
            utility: utility_of(weights, &self.partial),
            rounds: steps,
            messages: 0,
            elapsed: start.elapsed().as_secs_f64(),
            solution: self.partial,
        }
    }
}

/// Guiding heuristic flavor for rollout search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrsVariant {
    /// Complete each child with greedy on the residual utilities u''.
    Vanilla,
    /// Complete each child with greedy on the topology-aware utilities w''.
    Enhanced,
}

#[derive(Debug, Clone)]
pub struct RolloutConfig {
    pub branching: usize,
    pub variant: CrsVariant,
    /// Add the argmax-utility vertex to the candidate set when absent; makes
    /// the result dominate plain greedy on every instance.
    pub fortify: bool,
    /// Break Q-value ties randomly with this seed instead of by lowest index.
    pub tie_seed: Option<u64>,
}

impl Default for RolloutConfig {
    fn default() -> Self {
        RolloutConfig { branching: 32, variant: CrsVariant::Vanilla, fortify: false, tie_seed: None }
    }
}

/// Sorts residual sub-vertices by weight descending, original index ascending.
fn argsort_desc(weights: &[f64], map: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        weights[b].partial_cmp(&weights[a]).expect("finite weights").then(map[a].cmp(&map[b]))
    });
    order
}

/// GCN-guided centralized rollout search.
///
/// A single root-to-terminal traversal. At every step the residual graph is
/// embedded, the top-B vertices by w' = z' * u' become candidate actions, each
/// candidate is scored with a 1-step lookahead Q = u(v) + utility of a greedy
/// completion, and the best child is taken.
pub fn gcn_crs(
    graph: &ConflictGraph,
    utilities: &[f64],
    model: &GcnModel,
    config: &RolloutConfig,
) -> Result<SolveResult, SearchError> {
    if model.output_kind() != OutputKind::ScalarEmbedding {
        return Err(GcnError::WrongKind { expected: "scalar-embedding", got: model.output_kind() }.into());
    }
    assert!(config.branching >= 1);
    let start = Instant::now();
    let mut tie_rng = config.tie_seed.map(rng_from);
    let mut node = SearchNode::root(graph);
    let mut steps = 0;
    while !node.is_terminal() {
        let (sub, map) = graph.induced_subgraph(node.residual_mask());
        let u_sub: Vec<f64> = map.iter().map(|&v| utilities[v]).collect();
        let (z, _) = forward(&sub, features_column(&u_sub).view(), model)?;
        let z = z.scalar();
        let w_sub: Vec<f64> = z.iter().zip(&u_sub).map(|(a, b)| a * b).collect();
        let order = argsort_desc(&w_sub, &map);
        let mut candidates: Vec<usize> = order.iter().take(config.branching).map(|&i| map[i]).collect();
        if config.fortify {
            let best_u = *map
                .iter()
                .max_by(|&&a, &&b| {
                    utilities[a].partial_cmp(&utilities[b]).unwrap().then(b.cmp(&a))
                })
                .unwrap();
            if !candidates.contains(&best_u) {
                candidates.push(best_u);
            }
        }
        // position of each original vertex within the residual subgraph
        let mut sub_index = vec![usize::MAX; graph.vertex_count()];
        for (i, &v) in map.iter().enumerate() {
            sub_index[v] = i;
        }
        let mut best: Option<(f64, usize, SearchNode)> = None;
        let mut ties = 0usize;
        for &cand in &candidates {
            let child = node.expand(graph, cand)?;
            let (child_sub, child_map) = graph.induced_subgraph(child.residual_mask());
            let completion = match config.variant {
                CrsVariant::Vanilla => {
                    let u2: Vec<f64> = child_map.iter().map(|&v| utilities[v]).collect();
                    cgs(&child_sub, &u2).solution
                }
                CrsVariant::Enhanced => {
                    let w2: Vec<f64> = child_map.iter().map(|&v| w_sub[sub_index[v]]).collect();
                    cgs(&child_sub, &w2).solution
                }
            };
            // the completion is always scored with the original utilities
            let f_h: f64 = completion.iter().map(|&i| utilities[child_map[i]]).sum();
            let q = utilities[cand] + f_h;
            let better = match &best {
                None => true,
                Some((bq, bv, _)) => {
                    if q > *bq {
                        ties = 1;
                        true
                    } else if q == *bq {
                        ties += 1;
                        match &mut tie_rng {
                            // reservoir pick among tied candidates
                            Some(rng) => rng.random_range(0..ties) == 0,
                            None => cand < *bv,
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((q, cand, child));
            }
        }
        node = best.expect("candidate set is never empty").2;
        steps += 1;
    }
    Ok(node.into_result(utilities, start, steps))
}

/// GCN-guided centralized greedy search: the embedding is used directly as
/// per-vertex Q-values; epsilon-greedy action selection, 0 for deployment.
pub fn gcn_cgs_search(
    graph: &ConflictGraph,
    utilities: &[f64],
    model: &GcnModel,
    epsilon: f64,
    seed: u64,
) -> Result<SolveResult, SearchError> {
    if model.output_kind() != OutputKind::QValues {
        return Err(GcnError::WrongKind { expected: "q-values", got: model.output_kind() }.into());
    }
    let start = Instant::now();
    let mut rng = rng_from(seed);
    let mut node = SearchNode::root(graph);
    let mut steps = 0;
    while !node.is_terminal() {
        let (sub, map) = graph.induced_subgraph(node.residual_mask());
        let action = if epsilon > 0.0 && rng.random::<f64>() < epsilon {
            map[rng.random_range(0..map.len())]
        } else {
            let u_sub: Vec<f64> = map.iter().map(|&v| utilities[v]).collect();
            let (z, _) = forward(&sub, features_column(&u_sub).view(), model)?;
            let z = z.scalar();
            let best = (0..map.len())
                .max_by(|&a, &b| z[a].partial_cmp(&z[b]).unwrap().then(map[b].cmp(&map[a])))
                .unwrap();
            map[best]
        };
        node = node.expand(graph, action)?;
        steps += 1;
    }
    Ok(node.into_result(utilities, start, steps))
}

#[derive(Debug, Clone)]
pub struct CrtsConfig {
    /// Must match the model's logit-pair count.
    pub branching: usize,
    /// Probability of pushing a consistent intermediate node for backtracking.
    pub backtrack_prob: f64,
    pub timeout: Duration,
    pub threads: usize,
    pub seed: u64,
}

impl Default for CrtsConfig {
    fn default() -> Self {
        CrtsConfig {
            branching: 32,
            backtrack_prob: 0.02,
            timeout: Duration::from_secs(10),
            threads: 1,
            seed: 0,
        }
    }
}

/// Rollout of [`gcn_crts`]: the best solution plus the best-so-far utility
/// trace (elapsed seconds, utility), non-decreasing by construction.
#[derive(Debug, Clone)]
pub struct CrtsReport {
    pub result: SolveResult,
    pub trace: Vec<(f64, f64)>,
}

#[derive(Default)]
struct BestCandidate {
    solution: Option<Vec<usize>>,
    utility: f64,
    trace: Vec<(f64, f64)>,
}

struct CrtsShared {
    queue: Mutex<Vec<SearchNode>>,
    /// States ever enqueued; a state's exploration is deterministic, so
    /// re-pushing a duplicate can only repeat work.
    seen: Mutex<std::collections::HashSet<(Vec<bool>, Vec<usize>)>>,
    best: Mutex<BestCandidate>,
    active: AtomicUsize,
    started: Instant,
}

impl CrtsShared {
    fn push_unseen(&self, node: SearchNode) {
        let mut key_partial = node.partial.clone();
        key_partial.sort_unstable();
        let key = (node.residual.clone(), key_partial);
        if self.seen.lock().unwrap().insert(key) {
            self.queue.lock().unwrap().push(node);
        }
    }
}

/// GCN-guided centralized random tree search.
///
/// Nodes are popped from a shared queue in random order; each pop embeds the
/// residual graph into B probability columns and walks each column's vertices
/// in descending w' order, expanding consistent vertices. Before every
/// expansion, the sibling state that skips the vertex is pushed as a
/// backtrack point with probability `backtrack_prob` (at probability 1 the
/// search covers the entire include/exclude tree and finds the optimum given
/// time). Hitting a vertex already excluded by the partial solution pushes
/// the current node back for later resumption and ends that walk. Terminal
/// solutions accumulate in a candidate set; the best is returned at timeout
/// or queue exhaustion, and at least one terminal candidate is always
/// produced.
pub fn gcn_crts(
    graph: &ConflictGraph,
    utilities: &[f64],
    model: &GcnModel,
    config: &CrtsConfig,
) -> Result<CrtsReport, SearchError> {
    let branches = match model.output_kind() {
        OutputKind::CrtsLogits { branches } => branches,
        other => {
            return Err(GcnError::WrongKind { expected: "crts-logits", got: other }.into());
        }
    };
    if branches != config.branching {
        return Err(SearchError::BranchMismatch { cfg: config.branching, model: branches });
    }
    assert!(config.threads >= 1);
    let start = Instant::now();
    let shared = CrtsShared {
        queue: Mutex::new(vec![SearchNode::root(graph)]),
        seen: Mutex::new(std::collections::HashSet::new()),
        best: Mutex::new(BestCandidate { utility: f64::NEG_INFINITY, ..Default::default() }),
        active: AtomicUsize::new(0),
        started: start,
    };

    let worker = |tid: usize| -> Result<(), SearchError> {
        let mut rng = rng_from(subseed(config.seed, tid as u64));
        loop {
            let node = {
                let mut queue = shared.queue.lock().unwrap();
                if queue.is_empty() {
                    drop(queue);
                    if shared.active.load(Ordering::SeqCst) == 0 {
                        return Ok(()); // nothing in flight anywhere
                    }
                    std::thread::yield_now();
                    continue;
                }
                let have_candidate = shared.best.lock().unwrap().solution.is_some();
                if have_candidate && start.elapsed() >= config.timeout {
                    return Ok(());
                }
                let i = rng.random_range(0..queue.len());
                shared.active.fetch_add(1, Ordering::SeqCst);
                queue.swap_remove(i)
            };
            let outcome = crts_walk(graph, utilities, model, config, &shared, &mut rng, node);
            shared.active.fetch_sub(1, Ordering::SeqCst);
            outcome?;
        }
    };

    if config.threads == 1 {
        worker(0)?;
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..config.threads)
                .map(|tid| scope.spawn(move || worker(tid)))
                .collect();
            for h in handles {
                h.join().expect("worker panicked")?;
            }
            Ok::<(), SearchError>(())
        })?;
    }

    let (solution, utility, trace) = {
        let best = shared.best.lock().unwrap();
        (
            best.solution.clone().expect("at least one descent completes"),
            best.utility,
            best.trace.clone(),
        )
    };
    let mut solution = solution;
    solution.sort_unstable();
    Ok(CrtsReport {
        result: SolveResult {
            utility,
            rounds: 0,
            messages: 0,
            elapsed: start.elapsed().as_secs_f64(),
            solution,
        },
        trace,
    })
}

fn crts_walk(
    graph: &ConflictGraph,
    utilities: &[f64],
    model: &GcnModel,
    config: &CrtsConfig,
    shared: &CrtsShared,
    rng: &mut rand_chacha::ChaCha8Rng,
    node: SearchNode,
) -> Result<(), SearchError> {
    if node.is_terminal() {
        record_best(shared, utilities, &node);
        return Ok(());
    }
    let (sub, map) = graph.induced_subgraph(node.residual_mask());
    let u_sub: Vec<f64> = map.iter().map(|&v| utilities[v]).collect();
    let z = forward_crts(&sub, &u_sub, model)?;
    for column in 0..config.branching {
        let zc = z.column(column);
        let w_sub: Vec<f64> = zc.iter().zip(&u_sub).map(|(a, b)| a * b).collect();
        let order = argsort_desc(&w_sub, &map);
        let mut state = node.clone();
        let mut inconsistent = false;
        for &i in &order {
            let v = map[i];
            if !state.contains(v) {
                // v fell out of the residual along this walk: the node is
                // inconsistent with the stale column order; resume it later
                inconsistent = true;
                break;
            }
            // backtrack point: the sibling that skips v instead of taking it;
            // with probability 1 this enumerates every terminal node
            if rng.random::<f64>() < config.backtrack_prob {
                let sibling = state.skip(v)?;
                if !sibling.is_terminal() {
                    shared.push_unseen(sibling);
                }
            }
            state = state.expand(graph, v)?;
            if state.is_terminal() {
                break;
            }
        }
        if inconsistent {
            shared.push_unseen(state);
        } else {
            // terminal reached, or the order was exhausted without conflict
            // (every residual vertex got selected)
            debug_assert!(state.is_terminal());
            record_best(shared, utilities, &state);
        }
    }
    Ok(())
}

fn record_best(shared: &CrtsShared, utilities: &[f64], state: &SearchNode) {
    let util = utility_of(utilities, state.partial_solution());
    let mut best = shared.best.lock().unwrap();
    if best.solution.is_none() || util > best.utility {
        best.solution = Some(state.partial_solution().to_vec());
        best.utility = util;
        let t = shared.started.elapsed().as_secs_f64();
        best.trace.push((t, util));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcn::{Activation, GcnLayer};
    use crate::graph::{gen_er, VertexWeights};
    use ndarray::Array2;

    fn identity_model(kind: OutputKind) -> GcnModel {
        let layer = GcnLayer {
            theta0: Array2::from_elem((1, 1), 1.0),
            theta1: Array2::from_elem((1, 1), 0.0),
            activation: Activation::Linear,
        };
        GcnModel::new(vec![layer], kind).unwrap()
    }

    /// CRTS model whose logits are all zero, so every Z' entry is 0.5.
    fn constant_crts_model(branches: usize) -> GcnModel {
        let layer = GcnLayer {
            theta0: Array2::zeros((1, 2 * branches)),
            theta1: Array2::zeros((1, 2 * branches)),
            activation: Activation::Sigmoid,
        };
        GcnModel::new(vec![layer], OutputKind::CrtsLogits { branches }).unwrap()
    }

    fn path5() -> (ConflictGraph, Vec<f64>) {
        let g = ConflictGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        (g, vec![0.1, 0.2, 0.3, 0.4, 0.5])
    }

    #[test]
    fn expand_triangle_terminates() {
        let g = ConflictGraph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        for v in 0..3 {
            let child = SearchNode::root(&g).expand(&g, v).unwrap();
            assert!(child.is_terminal());
            assert_eq!(child.partial_solution(), &[v]);
        }
    }

    #[test]
    fn expand_removes_neighborhood() {
        let (g, _) = path5();
        let child = SearchNode::root(&g).expand(&g, 2).unwrap();
        assert_eq!(child.residual_count(), 2);
        assert!(child.contains(0) && child.contains(4));
        assert!(child.is_excluded(1) && child.is_excluded(3));
    }

    #[test]
    fn expand_rejects_non_residual_vertex() {
        let (g, _) = path5();
        let child = SearchNode::root(&g).expand(&g, 2).unwrap();
        assert!(matches!(child.expand(&g, 1), Err(SearchError::NotResidual(1))));
    }

    #[test]
    fn random_expand_chains_stay_independent() {
        let mut rng = rng_from(77);
        for seed in 0..40 {
            let g = gen_er(20, 0.25, seed);
            let mut node = SearchNode::root(&g);
            while !node.is_terminal() {
                let residual: Vec<usize> =
                    (0..20).filter(|&v| node.contains(v)).collect();
                let v = residual[rng.random_range(0..residual.len())];
                node = node.expand(&g, v).unwrap();
                assert!(g.is_independent_set(node.partial_solution()));
            }
        }
    }

    #[test]
    fn crs_identity_b1_equals_cgs() {
        let model = identity_model(OutputKind::ScalarEmbedding);
        let cfg = RolloutConfig { branching: 1, ..RolloutConfig::default() };
        for seed in 0..30 {
            let g = gen_er(25, 0.2, seed);
            let u = VertexWeights::uniform(25, seed + 50);
            let crs = gcn_crs(&g, &u, &model, &cfg).unwrap();
            let greedy = cgs(&g, &u);
            assert_eq!(crs.solution, greedy.solution, "seed {seed}");
        }
    }

    #[test]
    fn crs_fortified_dominates_cgs() {
        let model = GcnModel::glorot(&[1, 4, 1], 0.2, OutputKind::ScalarEmbedding, 3);
        let cfg = RolloutConfig { branching: 4, fortify: true, ..RolloutConfig::default() };
        for seed in 0..50 {
            let g = gen_er(30, 0.2, seed);
            let u = VertexWeights::uniform(30, seed + 99);
            let crs = gcn_crs(&g, &u, &model, &cfg).unwrap();
            let greedy = cgs(&g, &u);
            assert!(g.is_independent_set(&crs.solution));
            assert!(crs.utility >= greedy.utility - 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn crs_enhanced_variant_feasible() {
        let model = GcnModel::glorot(&[1, 4, 1], 0.2, OutputKind::ScalarEmbedding, 4);
        let cfg = RolloutConfig { branching: 8, variant: CrsVariant::Enhanced, ..Default::default() };
        for seed in 0..20 {
            let g = gen_er(25, 0.25, seed);
            let u = VertexWeights::uniform(25, seed);
            let r = gcn_crs(&g, &u, &model, &cfg).unwrap();
            assert!(g.is_independent_set(&r.solution));
            assert!(r.rounds <= 25); // one traversal, path length at most V
        }
    }

    #[test]
    fn crs_deterministic_without_tie_seed() {
        let model = GcnModel::glorot(&[1, 6, 1], 0.2, OutputKind::ScalarEmbedding, 5);
        let g = gen_er(30, 0.2, 8);
        let u = VertexWeights::uniform(30, 9);
        let cfg = RolloutConfig { branching: 8, ..Default::default() };
        let a = gcn_crs(&g, &u, &model, &cfg).unwrap();
        let b = gcn_crs(&g, &u, &model, &cfg).unwrap();
        assert_eq!(a.solution, b.solution);
    }

    #[test]
    fn cgs_search_identity_epsilon0_equals_cgs() {
        let model = identity_model(OutputKind::QValues);
        for seed in 0..30 {
            let g = gen_er(25, 0.2, seed);
            let u = VertexWeights::uniform(25, seed + 1);
            let r = gcn_cgs_search(&g, &u, &model, 0.0, 0).unwrap();
            assert_eq!(r.solution, cgs(&g, &u).solution, "seed {seed}");
        }
    }

    #[test]
    fn cgs_search_full_exploration_is_maximal_independent() {
        let model = identity_model(OutputKind::QValues);
        for seed in 0..20 {
            let g = gen_er(20, 0.3, seed);
            let u = VertexWeights::uniform(20, seed + 2);
            let r = gcn_cgs_search(&g, &u, &model, 1.0, seed).unwrap();
            assert!(g.is_independent_set(&r.solution));
            // maximal: every vertex outside is adjacent to the solution
            let mut blocked = [false; 20];
            for &v in &r.solution {
                blocked[v] = true;
                for &n in g.neighbors(v) {
                    blocked[n] = true;
                }
            }
            assert!(blocked.iter().all(|&b| b));
        }
    }

    #[test]
    fn cgs_search_rejects_scalar_model() {
        let g = gen_er(5, 0.3, 0);
        let m = identity_model(OutputKind::ScalarEmbedding);
        assert!(gcn_cgs_search(&g, &[1.0; 5], &m, 0.0, 0).is_err());
    }

    #[test]
    fn crts_constant_model_single_column_matches_cgs() {
        // constant Z' scales u uniformly, so the single descent is greedy
        let model = constant_crts_model(1);
        let cfg = CrtsConfig {
            branching: 1,
            backtrack_prob: 0.0,
            timeout: Duration::ZERO,
            ..Default::default()
        };
        for seed in 0..20 {
            let g = gen_er(20, 0.25, seed);
            let u = VertexWeights::uniform(20, seed + 3);
            let report = gcn_crts(&g, &u, &model, &cfg).unwrap();
            let greedy = cgs(&g, &u);
            assert_eq!(report.result.solution, greedy.solution, "seed {seed}");
        }
    }

    #[test]
    fn crts_trace_is_monotone() {
        let model = GcnModel::glorot(&[1, 6, 8], 0.2, OutputKind::CrtsLogits { branches: 4 }, 7);
        let cfg = CrtsConfig {
            branching: 4,
            backtrack_prob: 0.3,
            timeout: Duration::from_millis(50),
            seed: 1,
            ..Default::default()
        };
        let g = gen_er(18, 0.3, 12);
        let u = VertexWeights::uniform(18, 13);
        let report = gcn_crts(&g, &u, &model, &cfg).unwrap();
        assert!(g.is_independent_set(&report.result.solution));
        assert!(!report.trace.is_empty());
        for pair in report.trace.windows(2) {
            assert!(pair[1].1 >= pair[0].1);
            assert!(pair[1].0 >= pair[0].0);
        }
    }

    #[test]
    fn crts_exhaustive_reaches_optimum_on_tiny_graphs() {
        let model = GcnModel::glorot(&[1, 6, 8], 0.2, OutputKind::CrtsLogits { branches: 4 }, 11);
        let cfg = CrtsConfig {
            branching: 4,
            backtrack_prob: 1.0,
            timeout: Duration::from_secs(3600),
            seed: 5,
            ..Default::default()
        };
        for seed in 0..10 {
            let g = gen_er(10, 0.3, seed);
            let u = VertexWeights::uniform(10, seed + 20);
            let report = gcn_crts(&g, &u, &model, &cfg).unwrap();
            // brute-force optimum
            let mut best = 0.0f64;
            for mask in 0u32..(1 << 10) {
                let set: Vec<usize> = (0..10).filter(|&i| mask >> i & 1 == 1).collect();
                if g.is_independent_set(&set) {
                    best = best.max(utility_of(&u, &set));
                }
            }
            assert!((report.result.utility - best).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn crts_deterministic_single_thread() {
        let model = GcnModel::glorot(&[1, 4, 4], 0.2, OutputKind::CrtsLogits { branches: 2 }, 2);
        let cfg = CrtsConfig {
            branching: 2,
            backtrack_prob: 0.5,
            timeout: Duration::ZERO,
            seed: 42,
            ..Default::default()
        };
        let g = gen_er(15, 0.3, 3);
        let u = VertexWeights::uniform(15, 4);
        let a = gcn_crts(&g, &u, &model, &cfg).unwrap();
        let b = gcn_crts(&g, &u, &model, &cfg).unwrap();
        assert_eq!(a.result.solution, b.result.solution);
    }

    #[test]
    fn crts_parallel_workers_stay_feasible() {
        let model = GcnModel::glorot(&[1, 4, 4], 0.2, OutputKind::CrtsLogits { branches: 2 }, 6);
        let cfg = CrtsConfig {
            branching: 2,
            backtrack_prob: 0.2,
            timeout: Duration::from_millis(30),
            threads: 4,
            seed: 7,
        };
        let g = gen_er(30, 0.2, 5);
        let u = VertexWeights::uniform(30, 6);
        let report = gcn_crts(&g, &u, &model, &cfg).unwrap();
        assert!(g.is_independent_set(&report.result.solution));
    }

    #[test]
    fn crts_branch_mismatch_rejected() {
        let model = constant_crts_model(2);
        let cfg = CrtsConfig { branching: 3, ..Default::default() };
        let g = gen_er(5, 0.3, 0);
        assert!(matches!(
            gcn_crts(&g, &[1.0; 5], &model, &cfg),
            Err(SearchError::BranchMismatch { .. })
        ));
    }
}
