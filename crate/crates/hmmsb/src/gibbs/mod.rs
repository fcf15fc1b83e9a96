//! Collapsed Gibbs sampler over paths and interaction levels.
//!
//! The membership vectors and blockmodel entries are integrated out; the
//! sampler state is the observed network plus the latent paths and level
//! indicators, with two derived structures maintained incrementally: the
//! occupancy tree and the per-entry edge counts. A sweep resamples every
//! donor indicator, every receiver indicator, and then every actor's path.
//!
//! Invariants checked after each sweep in debug builds:
//! * the incremental edge counts equal a from-scratch recount,
//! * the occupancy tree equals the tree re-derived from the paths,
//! * branch labels are canonical,
//! * per-actor level count caches match the indicators.

mod level;
mod loglik;
mod path;

pub use loglik::{complete_log_likelihood_parts, LogLikelihoodParts};
pub use path::PathConditional;

use crate::error::{Fault, HmmsbError, Result};
use crate::gem::LevelBlockPrior;
use crate::hyper::Hyperparams;
use crate::levels::{Direction, LevelAssignments};
use crate::ncrp;
use crate::network::DirectedNetwork;
use crate::path::{Label, PathAssignment};
use crate::stats::{resolve_sb, CompatibilityStats, Resolution};
use crate::tree::HierarchyTree;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Site visiting order within one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
pub enum ScanOrder {
    /// All donor indicators in pair-lexicographic order, then all receiver
    /// indicators, then paths by actor index.
    #[default]
    Fixed,
    /// A uniformly shuffled permutation of the same sites each sweep.
    Random,
}

/// Where a chain starts.
///
/// `Prior` draws paths and levels from the model prior; joint-distribution
/// tests require it. `Singleton` places every actor in its own level-1
/// branch so the chain assembles communities by agglomeration, which mixes
/// far better on observed networks: merging realized branches is a
/// single-site move, while splitting a large community requires passing
/// through improbable intermediate states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ChainInit {
    #[default]
    Prior,
    Singleton,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Sweeps discarded before retention starts.
    pub burn_in: u64,
    /// Number of retained samples.
    pub n_samples: u64,
    /// Sweeps between retained samples (1 = keep every sweep).
    pub lag: u64,
    pub scan: ScanOrder,
    #[serde(default)]
    pub init: ChainInit,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.lag == 0 {
            return Err(HmmsbError::Config(
                "n_samples and lag must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn total_iterations(&self) -> u64 {
        self.burn_in + self.n_samples * self.lag
    }
}

/// One retained posterior sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RetainedSample {
    pub iteration: u64,
    pub paths: PathAssignment,
    pub levels: LevelAssignments,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    pub samples: Vec<RetainedSample>,
    /// Complete log-likelihood after every sweep, burn-in included.
    pub trace: Vec<f64>,
}

/// Mutable sampler state.
#[derive(Debug, Clone)]
pub struct SamplerState {
    network: DirectedNetwork,
    hyper: Hyperparams,
    paths: PathAssignment,
    tree: HierarchyTree,
    levels: LevelAssignments,
    /// Per-actor counts of its `2(n-1)` indicators by level; row-major
    /// `[actor][level-1]`.
    level_counts: Vec<u32>,
    stats: CompatibilityStats,
    /// Log normalizer of the depth-conditioned level block law for this
    /// network size (constant across the run).
    gem_log_norm: f64,
    iteration: u64,
}

impl SamplerState {
    /// Builds a state from explicit latents. Paths are canonicalized.
    pub fn from_parts(
        network: DirectedNetwork,
        mut paths: PathAssignment,
        levels: LevelAssignments,
        hyper: Hyperparams,
    ) -> Result<Self> {
        hyper.validate()?;
        let n = network.n_actors();
        if paths.n_actors() != n || levels.n_actors() != n {
            return Err(HmmsbError::Config(format!(
                "size mismatch: network has {n} actors, paths {}, levels {}",
                paths.n_actors(),
                levels.n_actors()
            )));
        }
        if paths.depth() != hyper.max_depth {
            return Err(HmmsbError::Config(format!(
                "paths have depth {} but max_depth is {}",
                paths.depth(),
                hyper.max_depth
            )));
        }
        paths.canonicalize();
        let tree = HierarchyTree::from_paths(&paths);
        let (stats, _, _) = CompatibilityStats::recount(&network, &paths, &levels);
        let level_counts = Self::recount_levels(&levels, hyper.max_depth);
        let gem_log_norm = if n > 1 {
            LevelBlockPrior::new(
                hyper.gem_a(),
                hyper.gem_b(),
                hyper.max_depth,
                2 * (n - 1),
            )
            .log_normalizer()
        } else {
            0.0
        };
        Ok(SamplerState {
            network,
            hyper,
            paths,
            tree,
            levels,
            level_counts,
            stats,
            gem_log_norm,
            iteration: 0,
        })
    }

    /// Draws paths and levels from the prior and attaches them to `network`.
    ///
    /// Paths come sequentially from the nested CRP; each actor's indicator
    /// block comes from the depth-conditioned GEM law, so the initial state
    /// is an exact prior draw (the distribution the sweep kernel leaves
    /// invariant when the network is regenerated alongside).
    pub fn init_from_prior<R: Rng + ?Sized>(
        network: DirectedNetwork,
        hyper: Hyperparams,
        rng: &mut R,
    ) -> Result<Self> {
        hyper.validate()?;
        let n = network.n_actors();
        let block_prior = if n > 1 {
            Some(LevelBlockPrior::new(
                hyper.gem_a(),
                hyper.gem_b(),
                hyper.max_depth,
                2 * (n - 1),
            ))
        } else {
            None
        };
        let (paths, levels) = sample_latents_from_prior(n, &hyper, block_prior.as_ref(), rng);
        Self::from_parts(network, paths, levels, hyper)
    }

    /// Builds the deterministic agglomeration start: every actor alone in its
    /// own level-1 branch, every indicator at level 1. Leaving the indicators
    /// coarse defers fine-level commitments until branches have formed;
    /// early level-2 indicators would veto path moves whose target makes an
    /// edge-carrying pair incompatible.
    pub fn init_singleton(network: DirectedNetwork, hyper: Hyperparams) -> Result<Self> {
        hyper.validate()?;
        let n = network.n_actors();
        let depth = hyper.max_depth;
        let paths = PathAssignment::from_paths(
            (0..n)
                .map(|a| {
                    let mut path = vec![1 as Label; depth];
                    path[0] = (a + 1) as Label;
                    path
                })
                .collect(),
            depth,
        )?;
        Self::from_parts(network, paths, LevelAssignments::ones(n), hyper)
    }

    fn recount_levels(levels: &LevelAssignments, depth: usize) -> Vec<u32> {
        let n = levels.n_actors();
        let mut counts = vec![0u32; n * depth];
        for a in 0..n {
            for z in levels.actor_indicators(a) {
                counts[a * depth + (z as usize - 1)] += 1;
            }
        }
        counts
    }

    pub fn network(&self) -> &DirectedNetwork {
        &self.network
    }

    pub fn hyper(&self) -> &Hyperparams {
        &self.hyper
    }

    pub fn paths(&self) -> &PathAssignment {
        &self.paths
    }

    pub fn levels(&self) -> &LevelAssignments {
        &self.levels
    }

    pub fn tree(&self) -> &HierarchyTree {
        &self.tree
    }

    pub fn stats(&self) -> &CompatibilityStats {
        &self.stats
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    fn depth(&self) -> usize {
        self.hyper.max_depth
    }

    /// Resolves the blockmodel entry of pair `(i, j)` under current state.
    fn resolve_pair(&self, i: usize, j: usize) -> Resolution {
        resolve_sb(
            self.paths.path(i),
            self.paths.path(j),
            self.levels.donor(i, j),
            self.levels.receiver(i, j),
        )
    }

    /// One full sweep; increments the iteration counter.
    pub fn sweep<R: Rng + ?Sized>(&mut self, scan: ScanOrder, rng: &mut R) {
        let n = self.network.n_actors();
        match scan {
            ScanOrder::Fixed => {
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            self.sample_level(i, j, Direction::Donor, rng);
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            self.sample_level(i, j, Direction::Receiver, rng);
                        }
                    }
                }
                for i in 0..n {
                    self.sample_path(i, rng);
                }
            }
            ScanOrder::Random => {
                enum Site {
                    Level(usize, usize, Direction),
                    Path(usize),
                }
                let mut sites = Vec::with_capacity(2 * n * (n - 1) + n);
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            sites.push(Site::Level(i, j, Direction::Donor));
                            sites.push(Site::Level(i, j, Direction::Receiver));
                        }
                    }
                    sites.push(Site::Path(i));
                }
                sites.shuffle(rng);
                for site in sites {
                    match site {
                        Site::Level(i, j, dir) => self.sample_level(i, j, dir, rng),
                        Site::Path(i) => self.sample_path(i, rng),
                    }
                }
            }
        }
        self.iteration += 1;
        #[cfg(debug_assertions)]
        self.verify_consistency().expect("sweep invariant violated");
    }

    /// Checks every incremental structure against a from-scratch rebuild.
    pub fn verify_consistency(&self) -> std::result::Result<(), Fault> {
        let (recount, incompatible, _) =
            CompatibilityStats::recount(&self.network, &self.paths, &self.levels);
        if recount != self.stats {
            return Err(Fault(format!(
                "incremental edge counts diverge from recount at iteration {}",
                self.iteration
            )));
        }
        let n = self.network.n_actors() as u64;
        if recount.total_observations() + incompatible != n * (n - 1) {
            return Err(Fault(
                "compatible plus incompatible pairs do not cover all ordered pairs".into(),
            ));
        }
        // The tree must mirror the multiset of path prefixes, and labels
        // must stay dense (every label below a realized one is realized).
        // First-visit ordering is not required: path moves permute labels.
        let mut derived: rustc_hash::FxHashMap<Vec<Label>, u32> = rustc_hash::FxHashMap::default();
        derived.insert(Vec::new(), self.paths.n_actors() as u32);
        for actor in 0..self.paths.n_actors() {
            let path = self.paths.path(actor);
            for t in 1..=path.len() {
                *derived.entry(path[..t].to_vec()).or_insert(0) += 1;
            }
        }
        let shape = self.tree.shape();
        if shape.len() != derived.len()
            || shape
                .iter()
                .any(|(prefix, occ)| derived.get(prefix) != Some(occ))
        {
            return Err(Fault(format!(
                "incremental tree diverges from path prefixes at iteration {}",
                self.iteration
            )));
        }
        for (prefix, _) in &shape {
            if let Some((&last, parent)) = prefix.split_last() {
                if last > 1 && !derived.contains_key(&[parent, &[last - 1]].concat()) {
                    return Err(Fault(format!(
                        "gap below label {last} under {parent:?} at iteration {}",
                        self.iteration
                    )));
                }
            }
        }
        if Self::recount_levels(&self.levels, self.depth()) != self.level_counts {
            return Err(Fault("per-actor level counts diverge from indicators".into()));
        }
        Ok(())
    }

    /// True when some pair carries an edge but resolves incompatible (a
    /// zero-probability configuration; possible only before the first sweep
    /// over an observed network).
    pub fn has_incompatible_edge(&self) -> bool {
        self.network.ordered_pairs().any(|(i, j)| {
            self.network.edge(i, j) && self.resolve_pair(i, j).is_incompatible()
        })
    }
}

/// Draws `(paths, levels)` from the model prior: paths sequentially from the
/// nested CRP, indicator blocks from the depth-conditioned GEM law.
///
/// `block_prior` must match `2 * (n - 1)` indicators per actor; pass `None`
/// only for `n == 1` (no indicators exist).
pub fn sample_latents_from_prior<R: Rng + ?Sized>(
    n: usize,
    hyper: &Hyperparams,
    block_prior: Option<&LevelBlockPrior>,
    rng: &mut R,
) -> (PathAssignment, LevelAssignments) {
    let paths = ncrp::sample_assignment(n, hyper, rng);
    let mut levels = LevelAssignments::ones(n);
    if let Some(prior) = block_prior {
        draw_level_blocks(&mut levels, prior, rng);
    }
    (paths, levels)
}

/// Fills every actor's indicator block with a draw from the block law,
/// donor slots first, then receiver slots, both in partner order.
fn draw_level_blocks<R: Rng + ?Sized>(
    levels: &mut LevelAssignments,
    prior: &LevelBlockPrior,
    rng: &mut R,
) {
    let n = levels.n_actors();
    assert_eq!(prior.block_size(), 2 * (n - 1));
    for a in 0..n {
        let block = prior.sample_block(rng);
        let mut it = block.into_iter();
        for j in 0..n {
            if j != a {
                levels.set(a, j, Direction::Donor, it.next().unwrap());
            }
        }
        for i in 0..n {
            if i != a {
                levels.set(i, a, Direction::Receiver, it.next().unwrap());
            }
        }
    }
}

/// Runs one chain: initialization per `config.init`, `burn_in` sweeps, then
/// retention of `n_samples` states every `lag` sweeps.
///
/// Retained samples are guaranteed free of edge-carrying incompatible pairs;
/// a violation would mean the kernel left the model's support and aborts.
pub fn run_chain<R: Rng + ?Sized>(
    network: DirectedNetwork,
    hyper: Hyperparams,
    config: &ChainConfig,
    rng: &mut R,
) -> Result<ChainResult> {
    config.validate()?;
    let mut state = match config.init {
        ChainInit::Prior => SamplerState::init_from_prior(network, hyper, rng)?,
        ChainInit::Singleton => SamplerState::init_singleton(network, hyper)?,
    };
    let total = config.total_iterations();
    let mut trace = Vec::with_capacity(total as usize);
    let mut samples = Vec::with_capacity(config.n_samples as usize);
    for iter in 1..=total {
        state.sweep(config.scan, rng);
        let ll = state.complete_log_likelihood();
        trace.push(ll);
        let past_burn_in = iter > config.burn_in;
        if past_burn_in && (iter - config.burn_in).is_multiple_of(config.lag) {
            assert!(
                !state.has_incompatible_edge(),
                "retained sample contains an edge between incompatible paths"
            );
            samples.push(RetainedSample {
                iteration: iter,
                paths: state.paths.clone(),
                levels: state.levels.clone(),
                log_likelihood: ll,
            });
        }
    }
    Ok(ChainResult { samples, trace })
}
