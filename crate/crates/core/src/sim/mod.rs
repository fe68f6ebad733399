//! Monte Carlo engine for the tree of cliques.
//!
//! Randomness is keyed per vertex: the draws of a vertex (how many child
//! cliques it has and their sizes) come from a generator seeded by a key
//! derived from its parent's key and its position in the parent's cliques.
//! A realization is therefore a fixed function of the root key, whatever
//! order vertices are visited in and however deep the graph is truncated.

mod engine;
mod gamma;
mod graph;
mod keys;

pub use engine::{estimate, ReplicateCounts, SimConfig, SimReport};
pub use gamma::{sample_gamma_prime_generation, Census, GammaPrime};
pub use graph::{run_contagion, sample_local_graph, CliqueRecord, LocalGraph, VertexRecord};
pub use keys::{child_key, replicate_key, Sampler};
