//! Evaluation of inferred hierarchies: pair-counting F1, consensus
//! post-processing of posterior samples, importance-sampled marginal
//! likelihood, and the held-out hyperparameter selection protocol.

mod consensus;
mod f1;
mod heldout;
mod marginal;

pub use consensus::{
    coassignment, consensus, consensus_paths, merge_small_communities, mode_levels, Coassignment,
    ConsensusResult,
};
pub use f1::{f1_at_level, f1_report, total_f1, F1Level, F1Report};
pub use heldout::{
    heldout_protocol, select_gamma, select_lambda, HeldoutConfig, HeldoutReport, SplitResult,
    GAMMA_GRID,
};
pub use marginal::{estimate_from_log_weights, marginal_likelihood_is, IsEstimate};
