//! Threshold contagion on the one-mode projection of an alternating
//! branching process (a tree of overlapping cliques).
//!
//! The crate computes the closed-form quantities of the model (extinction
//! probability, root degree law, clustering coefficient), the exact
//! within-clique cascade law, the mean matrix of active children by type and
//! its Perron root, and the resulting cascade verdict. Every closed form has
//! an independent check: brute-force enumeration of the clique dynamics and
//! Monte Carlo simulation of the graph itself.

pub mod analytic;
pub mod cli;
pub mod clique;
pub mod dist;
mod error;
pub mod matrix;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
