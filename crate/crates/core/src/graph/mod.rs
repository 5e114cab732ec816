//! Conflict-graph representation, random generators, Laplacian construction,
//! multi-channel expansion, perturbation, and file I/O.

mod gen;
mod io;

pub use gen::{gen_ba, gen_er, multi_channel_graph, multi_channel_graph_with, perturb_edges, PerturbStats};
pub use io::{load_graph, save_graph, GraphIoError};

use std::ops::Deref;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("weight at index {0} is not finite")]
    NonFiniteWeight(usize),
    #[error("weight vector length {got} does not match vertex count {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("attachment count m={m} must satisfy 1 <= m < V={v}")]
    BadAttachment { m: usize, v: usize },
}

/// Undirected conflict graph over wireless links.
///
/// Vertices are links; an edge marks mutual interference. Neighbor lists are
/// kept sorted ascending, with no self-loops and no duplicates, so that all
/// per-vertex reductions have a fixed summation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl ConflictGraph {
    /// Graph with `vertex_count` vertices and no edges.
    pub fn empty(vertex_count: usize) -> Self {
        Self { adj: vec![Vec::new(); vertex_count], edge_count: 0 }
    }

    /// Builds a graph from an edge list, validating all invariants.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); vertex_count];
        let mut edge_count = 0;
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for &x in [u, v].iter() {
                if x >= vertex_count {
                    return Err(GraphError::VertexOutOfRange { vertex: x, count: vertex_count });
                }
            }
            adj[u].push(v);
            adj[v].push(u);
            edge_count += 1;
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(v.min(w[0]), v.max(w[0])));
            }
        }
        Ok(Self { adj, edge_count })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbors of `v`, sorted ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn average_degree(&self) -> f64 {
        if self.adj.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.adj.len() as f64
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as (i, j) pairs with i < j, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// True when no two vertices of `set` are adjacent.
    pub fn is_independent_set(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.vertex_count()];
        for &v in set {
            if v >= self.vertex_count() || member[v] {
                return false;
            }
            member[v] = true;
        }
        set.iter().all(|&v| self.adj[v].iter().all(|&u| !member[u]))
    }

    /// Subgraph induced by the vertices with `keep[v] == true`.
    ///
    /// Returns the subgraph and the map from new index to original index
    /// (ascending, so relative vertex order is preserved).
    pub fn induced_subgraph(&self, keep: &[bool]) -> (ConflictGraph, Vec<usize>) {
        assert_eq!(keep.len(), self.vertex_count());
        let map: Vec<usize> = (0..keep.len()).filter(|&v| keep[v]).collect();
        let mut inverse = vec![usize::MAX; keep.len()];
        for (new, &old) in map.iter().enumerate() {
            inverse[old] = new;
        }
        let mut adj = vec![Vec::new(); map.len()];
        let mut edge_count = 0;
        for (new, &old) in map.iter().enumerate() {
            for &u in &self.adj[old] {
                if keep[u] {
                    adj[new].push(inverse[u]);
                    if inverse[u] > new {
                        edge_count += 1;
                    }
                }
            }
        }
        (ConflictGraph { adj, edge_count }, map)
    }

    /// Validates the structural invariants; used by generator tests.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let v = self.vertex_count();
        let mut degree_sum = 0;
        for (x, list) in self.adj.iter().enumerate() {
            degree_sum += list.len();
            for w in list.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::DuplicateEdge(x.min(w[0]), x.max(w[0])));
                }
                assert!(w[0] < w[1], "neighbor list not sorted");
            }
            for &u in list {
                if u == x {
                    return Err(GraphError::SelfLoop(x));
                }
                if u >= v {
                    return Err(GraphError::VertexOutOfRange { vertex: u, count: v });
                }
                if !self.has_edge(u, x) {
                    return Err(GraphError::DuplicateEdge(x, u));
                }
            }
        }
        assert_eq!(degree_sum, 2 * self.edge_count, "degree sum != 2E");
        Ok(())
    }
}

/// Per-link utilities paired with a conflict graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexWeights {
    values: Vec<f64>,
}

impl VertexWeights {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(GraphError::NonFiniteWeight(i));
        }
        Ok(Self { values })
    }

    /// Checks the length against a graph before pairing.
    pub fn for_graph(values: Vec<f64>, graph: &ConflictGraph) -> Result<Self, GraphError> {
        if values.len() != graph.vertex_count() {
            return Err(GraphError::WeightLength { got: values.len(), expected: graph.vertex_count() });
        }
        Self::new(values)
    }

    /// I.i.d. uniform(0, 1) draws, the default experiment distribution.
    pub fn uniform(count: usize, seed: u64) -> Self {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(seed);
        Self { values: (0..count).map(|_| rng.random::<f64>()).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl Deref for VertexWeights {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// Symmetric normalized Laplacian in sparse row form.
///
/// Every diagonal entry is exactly 1, including isolated vertices (the
/// per-vertex aggregation with an empty neighbor sum forces this convention);
/// the off-diagonal entry for edge (u, v) is -1/sqrt(d(u) d(v)).
#[derive(Debug, Clone)]
pub struct NormalizedLaplacian {
    /// Per vertex: (neighbor, -1/sqrt(d(v) d(u))) ascending by neighbor.
    rows: Vec<Vec<(usize, f64)>>,
}

impl NormalizedLaplacian {
    pub fn new(graph: &ConflictGraph) -> Self {
        let inv_sqrt: Vec<f64> = (0..graph.vertex_count())
            .map(|v| {
                let d = graph.degree(v);
                if d == 0 {
                    0.0
                } else {
                    1.0 / (d as f64).sqrt()
                }
            })
            .collect();
        let rows = (0..graph.vertex_count())
            .map(|v| {
                graph
                    .neighbors(v)
                    .iter()
                    .map(|&u| (u, -inv_sqrt[v] * inv_sqrt[u]))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    /// Off-diagonal entries of row `v` as (column, value), ascending.
    pub fn off_diagonal(&self, v: usize) -> &[(usize, f64)] {
        &self.rows[v]
    }

    /// L x for a vector, accumulating neighbors in ascending index order.
    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows.len());
        self.rows
            .iter()
            .enumerate()
            .map(|(v, row)| {
                let mut acc = x[v];
                for &(u, c) in row {
                    acc += c * x[u];
                }
                acc
            })
            .collect()
    }

    /// L X for a feature matrix, row by row in ascending neighbor order.
    pub fn apply(&self, x: &ndarray::ArrayView2<f64>) -> ndarray::Array2<f64> {
        assert_eq!(x.nrows(), self.rows.len());
        let mut out = x.to_owned();
        for (v, row) in self.rows.iter().enumerate() {
            for &(u, c) in row {
                let src = x.row(u).to_owned();
                let mut dst = out.row_mut(v);
                dst.scaled_add(c, &src);
            }
        }
        out
    }

    /// Dense V x V materialization.
    pub fn to_dense(&self) -> ndarray::Array2<f64> {
        let n = self.rows.len();
        let mut m = ndarray::Array2::zeros((n, n));
        for (v, row) in self.rows.iter().enumerate() {
            m[(v, v)] = 1.0;
            for &(u, c) in row {
                m[(v, u)] = c;
            }
        }
        m
    }
}

/// Convenience wrapper matching the operation name used throughout.
pub fn normalized_laplacian(graph: &ConflictGraph) -> NormalizedLaplacian {
    NormalizedLaplacian::new(graph)
}

/// Index bookkeeping for the K-channel expansion of a conflict graph.
///
/// Expanded vertex `k * V + v` is the copy of base link `v` on channel `k`,
/// a bijection between expanded indices and (link, channel) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiChannelMap {
    base_vertices: usize,
    channels: usize,
}

impl MultiChannelMap {
    pub fn new(base_vertices: usize, channels: usize) -> Self {
        Self { base_vertices, channels }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn base_vertices(&self) -> usize {
        self.base_vertices
    }

    pub fn expanded_count(&self) -> usize {
        self.base_vertices * self.channels
    }

    pub fn expanded_index(&self, link: usize, channel: usize) -> usize {
        debug_assert!(link < self.base_vertices && channel < self.channels);
        channel * self.base_vertices + link
    }

    /// (base link, channel) of an expanded vertex.
    pub fn base_of(&self, expanded: usize) -> (usize, usize) {
        debug_assert!(expanded < self.expanded_count());
        (expanded % self.base_vertices, expanded / self.base_vertices)
    }
}
