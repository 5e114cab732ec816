//! Distributed GCN-guided solvers: LGS on topology-scaled utilities
//! w = z * u, with the embedding z coming from a GCN, a per-vertex MLP,
//! random draws, a constant, or a cached (reused) topological embedding.

use std::time::Instant;

use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::gcn::{forward, GcnError, GcnModel, ModelArch, OutputKind};
use crate::graph::ConflictGraph;
use crate::greedy::{lgs, lgs_round, utility_of, SolveResult};
use crate::rng::rng_from;

#[derive(Debug, Error)]
pub enum DistError {
    #[error(transparent)]
    Gcn(#[from] GcnError),
    #[error("cached embedding has {got} entries but the graph has {expected} vertices")]
    Dimension { expected: usize, got: usize },
    #[error("embedding source needs a {0} model")]
    WrongModel(&'static str),
}

/// Input features for an embedding model.
#[derive(Debug, Clone, Copy)]
pub enum FeatureKind {
    /// S = 1, the featureless case; the embedding is purely topological and
    /// can be cached across slots while the topology is stable.
    Ones,
    /// S = u, the per-link utilities.
    Utilities,
    /// Degree d(v) normalized by the average degree, paired with a constant
    /// column; the per-vertex MLP ablation input. The constant column routes
    /// a bias through the bias-free layers -- without it a positive scalar
    /// input never crosses an activation kink and the whole network collapses
    /// to one linear scaling.
    Degree,
}

impl FeatureKind {
    pub fn build(&self, graph: &ConflictGraph, utilities: &[f64]) -> ndarray::Array2<f64> {
        match self {
            FeatureKind::Ones => crate::gcn::features_ones(graph.vertex_count()),
            FeatureKind::Utilities => crate::gcn::features_column(utilities),
            FeatureKind::Degree => {
                let mean = graph.average_degree().max(1.0);
                let v = graph.vertex_count();
                let mut x = ndarray::Array2::ones((v, 2));
                for i in 0..v {
                    x[(i, 0)] = graph.degree(i) as f64 / mean;
                }
                x
            }
        }
    }

    /// Input width this feature kind produces.
    pub fn width(&self) -> usize {
        match self {
            FeatureKind::Degree => 2,
            _ => 1,
        }
    }
}

/// A stored topological embedding with its provenance, applied verbatim.
#[derive(Debug, Clone)]
pub struct CachedEmbedding {
    pub values: Vec<f64>,
    /// Free-form identifier of the originating graph (seed, file, slot).
    pub origin: String,
}

/// Where the per-vertex scaling z comes from.
#[derive(Debug, Clone)]
pub enum EmbeddingSource<'a> {
    /// Fresh GCN forward pass; costs L extra exchange rounds.
    Gcn { model: &'a GcnModel, features: FeatureKind },
    /// Per-vertex MLP on normalized degree; no exchanges needed.
    Mlp { model: &'a GcnModel },
    /// z_v ~ Normal(mean, sd) i.i.d., the random ablation.
    Random { mean: f64, sd: f64, seed: u64 },
    Constant(f64),
    /// Reuse of a previously computed embedding.
    Cached(&'a CachedEmbedding),
}

pub struct ResolvedEmbedding {
    pub values: Vec<f64>,
    /// Local-exchange rounds spent obtaining the embedding.
    pub exchange_rounds: usize,
}

pub fn resolve_embedding(
    source: &EmbeddingSource,
    graph: &ConflictGraph,
    utilities: &[f64],
) -> Result<ResolvedEmbedding, DistError> {
    let v = graph.vertex_count();
    match source {
        EmbeddingSource::Gcn { model, features } => {
            if model.output_kind() != OutputKind::ScalarEmbedding {
                return Err(DistError::WrongModel("scalar-embedding"));
            }
            let x0 = features.build(graph, utilities);
            let (z, _) = forward(graph, x0.view(), model)?;
            Ok(ResolvedEmbedding { values: z.scalar(), exchange_rounds: model.layer_count() })
        }
        EmbeddingSource::Mlp { model } => {
            if model.arch() != ModelArch::VertexMlp {
                return Err(DistError::WrongModel("vertex-mlp"));
            }
            let x0 = FeatureKind::Degree.build(graph, utilities);
            let (z, _) = forward(graph, x0.view(), model)?;
            // degree is already known locally, so no extra exchanges
            Ok(ResolvedEmbedding { values: z.scalar(), exchange_rounds: 0 })
        }
        EmbeddingSource::Random { mean, sd, seed } => {
            let normal = Normal::new(*mean, *sd).expect("valid normal parameters");
            let mut rng = rng_from(*seed);
            let values = (0..v).map(|_| normal.sample(&mut rng)).collect();
            Ok(ResolvedEmbedding { values, exchange_rounds: 0 })
        }
        EmbeddingSource::Constant(c) => {
            Ok(ResolvedEmbedding { values: vec![*c; v], exchange_rounds: 0 })
        }
        EmbeddingSource::Cached(cache) => {
            if cache.values.len() != v {
                return Err(DistError::Dimension { expected: v, got: cache.values.len() });
            }
            Ok(ResolvedEmbedding { values: cache.values.clone(), exchange_rounds: 0 })
        }
    }
}

/// LGS on the topology-aware utilities w = z * u. The reported utility uses
/// the original u; rounds include the embedding's exchange rounds.
pub fn gcn_lgs(
    graph: &ConflictGraph,
    utilities: &[f64],
    source: &EmbeddingSource,
    max_rounds: Option<usize>,
) -> Result<SolveResult, DistError> {
    let start = Instant::now();
    let embedding = resolve_embedding(source, graph, utilities)?;
    let w: Vec<f64> = embedding.values.iter().zip(utilities).map(|(z, u)| z * u).collect();
    let mut r = lgs(graph, &w, max_rounds);
    r.utility = utility_of(utilities, &r.solution);
    r.rounds += embedding.exchange_rounds;
    r.elapsed = start.elapsed().as_secs_f64();
    Ok(r)
}

/// LGS with the embedding recomputed on the residual graph before every
/// selection round; costs L+1 exchange rounds per outer round.
pub fn gcn_lgs_it(
    graph: &ConflictGraph,
    features: FeatureKind,
    utilities: &[f64],
    model: &GcnModel,
    max_outer: Option<usize>,
) -> Result<SolveResult, DistError> {
    if model.output_kind() != OutputKind::ScalarEmbedding {
        return Err(DistError::WrongModel("scalar-embedding"));
    }
    let start = Instant::now();
    let limit = max_outer.unwrap_or(usize::MAX);
    let v = graph.vertex_count();
    let mut alive = vec![true; v];
    let mut remaining = v;
    let mut solution = Vec::new();
    let mut rounds = 0;
    let mut outer = 0;
    while remaining > 0 && outer < limit {
        let (sub, map) = graph.induced_subgraph(&alive);
        let u_sub: Vec<f64> = map.iter().map(|&x| utilities[x]).collect();
        let x0 = features.build(&sub, &u_sub);
        let (z, _) = forward(&sub, x0.view(), model)?;
        let w_sub: Vec<f64> = z.scalar().iter().zip(&u_sub).map(|(a, b)| a * b).collect();
        let mut sub_alive = vec![true; sub.vertex_count()];
        let (winners, _) = lgs_round(&sub, &w_sub, &mut sub_alive);
        rounds += model.layer_count() + 1;
        for &w_idx in &winners {
            let orig = map[w_idx];
            solution.push(orig);
            alive[orig] = false;
            for &n in graph.neighbors(orig) {
                alive[n] = false;
            }
        }
        remaining = alive.iter().filter(|&&a| a).count();
        outer += 1;
    }
    solution.sort_unstable();
    Ok(SolveResult {
        utility: utility_of(utilities, &solution),
        rounds,
        messages: solution.len(),
        elapsed: start.elapsed().as_secs_f64(),
        solution,
    })
}
