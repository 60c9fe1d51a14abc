//! Conditional randomization tests of causal hypotheses under interference.
//!
//! A null hypothesis on exposures induces a bipartite *null exposure graph*
//! between units and assignments. Within any biclique of that graph the
//! hypothesis is sharp, so conditioning on the biclique that contains the
//! observed assignment gives an exact randomization test. This crate builds the
//! graph, decomposes it into bicliques and runs the test.

pub mod bits;
mod combin;
pub mod engine;
pub mod error;
pub mod exposure;
pub mod graph;
pub mod rng;
pub mod test;

pub use combin::{combinations, esp, ln_choose, sample_weighted_subset};
pub use error::{Error, Result};
