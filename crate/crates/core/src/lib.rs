//! Conditional tests for strategic interaction in directed network formation.
//!
//! The null model is a dyadic logit with sender and receiver effects and
//! group homophily. Conditional on degrees and the cross-link matrix every
//! network is equally likely, so tests compare an observed statistic with
//! draws from a uniform Markov chain on that reference set.

pub mod error;
pub mod graph;
pub mod harness;
pub mod inference;
pub mod io;
pub mod manifest;
pub mod model;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use graph::{
    cross_link_matrix, degree_sequence, dyad_census, reciprocity_index, transitivity_index,
    AdjacencyMatrix, CrossLinkMatrix, DegreeSequence, DyadCensus, GroupAssignment,
};
