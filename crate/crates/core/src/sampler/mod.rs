//! Uniform sampling of networks with fixed degree sequences and cross-link
//! matrix, and exhaustive enumeration for small instances.

mod chain;
mod enumerate;
mod schlaufe;

pub use chain::{
    markov_draw, markov_step, mixing_time_heuristic, parallel_draws, tau_from_pilot, Chain,
    ChainConfig, ChainStats, StepOutcome, DEFAULT_Q,
};
pub use enumerate::{enumerate_reference_set, ENUMERATION_CAP};
pub use schlaufe::{
    detect_schlaufe, switch_cycle, violation_of_cycle, walk_log_prob, LinkMarks, Role, Schlaufe,
    ViolationMatrix,
};
