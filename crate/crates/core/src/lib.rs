//! MWIS solvers and link scheduling on wireless conflict graphs.
//!
//! The crate is organized around a pipeline: conflict graphs ([`graph`]),
//! per-vertex embeddings from a graph convolutional network ([`gcn`]),
//! greedy and search-based maximum-weighted-independent-set solvers
//! ([`greedy`], [`search`], [`distributed`]), an exact branch-and-bound
//! oracle for scoring them ([`exact`]), trainers for the embedding models
//! ([`train`]), and a time-slotted scheduling simulator ([`sim`]).

pub mod distributed;
pub mod exact;
pub mod gcn;
pub mod graph;
pub mod greedy;
pub mod rng;
pub mod search;
pub mod sim;
pub mod train;

pub use graph::{ConflictGraph, MultiChannelMap, NormalizedLaplacian, VertexWeights};
pub use greedy::SolveResult;
