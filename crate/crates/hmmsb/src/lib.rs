//! Hierarchical mixed membership stochastic blockmodel (hMMSB).
//!
//! Actors in a directed network are organized in a depth-`K` community
//! hierarchy drawn from a nested Chinese restaurant process. Each actor also
//! carries a mixed membership vector over hierarchy levels, drawn from a
//! truncated two-parameter stick-breaking (GEM) prior. A directed pair
//! interacts at the coarser of the two endpoint levels; the edge probability
//! is a Beta-distributed blockmodel entry resolved at that level, or zero when
//! the endpoints live in unrelated subtrees.
//!
//! The crate provides:
//!
//! * forward simulation of networks from the model ([`generative`]),
//! * collapsed Gibbs sampling over paths and interaction levels with the
//!   membership vectors and blockmodel entries integrated out ([`gibbs`]),
//! * evaluation: pair-counting F1 against a reference hierarchy, consensus
//!   post-processing of posterior samples, importance-sampled marginal
//!   likelihood, and a held-out hyperparameter selection protocol ([`eval`]),
//! * file formats and the `hmmsb` command-line tool ([`io`], [`cli`]).
//!
//! All probability computations use `f64`; branch labels are `u16` (at most
//! 65,535 actors) and levels are `u8` (hierarchy depth at most 255).

pub mod cli;
pub mod error;
pub mod eval;
pub mod gem;
pub mod generative;
pub mod gibbs;
pub mod hyper;
pub mod io;
pub mod levels;
pub mod ncrp;
pub mod network;
pub mod path;
pub mod seed;
pub mod special;
pub mod stats;
pub mod tree;

pub use error::{Fault, HmmsbError};
pub use gibbs::{
    run_chain, ChainConfig, ChainInit, ChainResult, RetainedSample, SamplerState, ScanOrder,
};
pub use hyper::Hyperparams;
pub use levels::{Direction, LevelAssignments};
pub use network::DirectedNetwork;
pub use path::{Label, PathAssignment};
pub use stats::{resolve_sb, CompatibilityStats, EntryKey, Resolution};
pub use tree::HierarchyTree;
