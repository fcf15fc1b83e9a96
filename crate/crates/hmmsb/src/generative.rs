//! Forward simulation from the hierarchical blockmodel.

use crate::error::{HmmsbError, Result};
use crate::gem::{sample_gem, MembershipVector};
use crate::hyper::Hyperparams;
use crate::levels::{Direction, LevelAssignments};
use crate::ncrp;
use crate::network::DirectedNetwork;
use crate::path::PathAssignment;
use crate::stats::{resolve_sb, EntryKey, Resolution};
use rand::Rng;
use rand_distr::{Beta, Distribution};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

/// Deterministic blockmodel entries for the simulation studies: entry values
/// depend only on the level and whether the pair sits on the diagonal
/// (same child branch) or off it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BRegime {
    /// Value for same-child pairs, per level (index `k-1`).
    pub on_diagonal: Vec<f64>,
    /// Value for different-child pairs, per level.
    pub off_diagonal: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_actors: usize,
    pub hyper: Hyperparams,
    /// When set, every actor shares this membership vector instead of
    /// drawing one from the GEM prior. Renormalized if needed.
    pub fixed_theta: Option<Vec<f64>>,
    /// When set, blockmodel entries come from the regime instead of
    /// `Beta(lambda1, lambda2)` draws.
    pub fixed_b: Option<BRegime>,
    /// When set, actors keep these paths instead of drawing them from the
    /// nested CRP; used by controlled recovery studies that sweep hierarchy
    /// shapes. Must be canonical and sized `n_actors` x `max_depth`.
    /// Not part of the serialized config surface.
    #[serde(skip)]
    pub fixed_paths: Option<PathAssignment>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        if self.n_actors == 0 {
            return Err(HmmsbError::Config("n_actors must be positive".into()));
        }
        if self.n_actors > u16::MAX as usize {
            return Err(HmmsbError::Config(format!(
                "at most {} actors are supported",
                u16::MAX
            )));
        }
        let depth = self.hyper.max_depth;
        if let Some(theta) = &self.fixed_theta {
            if theta.len() != depth {
                return Err(HmmsbError::Config(format!(
                    "fixed_theta has {} entries but the depth is {depth}",
                    theta.len()
                )));
            }
            MembershipVector::from_weights(theta)?;
        }
        if let Some(b) = &self.fixed_b {
            for (name, v) in [("b_on", &b.on_diagonal), ("b_off", &b.off_diagonal)] {
                if v.len() != depth {
                    return Err(HmmsbError::Config(format!(
                        "{name} has {} entries but the depth is {depth}",
                        v.len()
                    )));
                }
                if v.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(HmmsbError::Config(format!(
                        "{name} entries must be probabilities in [0, 1]"
                    )));
                }
            }
        }
        if let Some(paths) = &self.fixed_paths {
            if paths.n_actors() != self.n_actors || paths.depth() != depth {
                return Err(HmmsbError::Config(format!(
                    "fixed_paths is {} x {} but the simulation is {} x {depth}",
                    paths.n_actors(),
                    paths.depth(),
                    self.n_actors
                )));
            }
        }
        Ok(())
    }
}

/// A simulated network along with the latent state that produced it.
#[derive(Debug, Clone)]
pub struct GeneratedNetwork {
    pub network: DirectedNetwork,
    pub paths: PathAssignment,
    pub memberships: Vec<MembershipVector>,
    pub levels: LevelAssignments,
    /// Realized blockmodel entries with their edge probabilities, key-sorted.
    /// Entries never touched by a compatible pair are absent.
    pub b_entries: Vec<(EntryKey, f64)>,
}

enum EntrySource<'a> {
    Regime(&'a BRegime),
    Prior { lambda1: f64, lambda2: f64 },
}

fn realize_edges<R: Rng + ?Sized>(
    paths: &PathAssignment,
    levels: &LevelAssignments,
    source: EntrySource,
    rng: &mut R,
) -> Result<(DirectedNetwork, Vec<(EntryKey, f64)>)> {
    let n = paths.n_actors();
    let mut network = DirectedNetwork::new(n)?;
    let mut realized: FxHashMap<EntryKey, f64> = FxHashMap::default();
    let beta = match source {
        EntrySource::Prior { lambda1, lambda2 } => {
            Some(Beta::new(lambda1, lambda2).expect("validated Beta shapes"))
        }
        EntrySource::Regime(_) => None,
    };
    for (i, j) in network.ordered_pairs().collect::<Vec<_>>() {
        let res = resolve_sb(
            paths.path(i),
            paths.path(j),
            levels.get(i, j, Direction::Donor),
            levels.get(i, j, Direction::Receiver),
        );
        let p = match res {
            Resolution::Incompatible => 0.0,
            Resolution::Entry(key) => *realized.entry(key.clone()).or_insert_with(|| {
                match (&source, &beta) {
                    (EntrySource::Regime(regime), _) => {
                        let level = key.level() as usize;
                        if key.is_diagonal() {
                            regime.on_diagonal[level - 1]
                        } else {
                            regime.off_diagonal[level - 1]
                        }
                    }
                    (EntrySource::Prior { .. }, Some(beta)) => beta.sample(rng),
                    (EntrySource::Prior { .. }, None) => unreachable!(),
                }
            }),
        };
        network.set_edge(i, j, rng.random::<f64>() < p);
    }
    let mut b_entries: Vec<(EntryKey, f64)> = realized.into_iter().collect();
    b_entries.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((network, b_entries))
}

/// Simulates one network: paths from the nested CRP, memberships from the
/// truncated GEM (or the fixed override), level indicators per ordered pair,
/// blockmodel entries realized lazily, edges Bernoulli.
pub fn generate<R: Rng + ?Sized>(config: &SimulationConfig, rng: &mut R) -> Result<GeneratedNetwork> {
    config.validate()?;
    let n = config.n_actors;
    let hyper = &config.hyper;
    let paths = match &config.fixed_paths {
        Some(paths) => paths.clone(),
        None => ncrp::sample_assignment(n, hyper, rng),
    };

    let memberships: Vec<MembershipVector> = match &config.fixed_theta {
        Some(theta) => {
            let mv = MembershipVector::from_weights(theta)?;
            vec![mv; n]
        }
        None => (0..n)
            .map(|_| sample_gem(hyper.gem_a(), hyper.gem_b(), hyper.max_depth, rng))
            .collect(),
    };

    let mut levels = LevelAssignments::ones(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                levels.set(i, j, Direction::Donor, memberships[i].sample_level(rng));
                levels.set(i, j, Direction::Receiver, memberships[j].sample_level(rng));
            }
        }
    }

    let source = match &config.fixed_b {
        Some(regime) => EntrySource::Regime(regime),
        None => EntrySource::Prior {
            lambda1: hyper.lambda1,
            lambda2: hyper.lambda2,
        },
    };
    let (network, b_entries) = realize_edges(&paths, &levels, source, rng)?;
    Ok(GeneratedNetwork {
        network,
        paths,
        memberships,
        levels,
        b_entries,
    })
}

/// Redraws every edge given paths and levels, with the blockmodel entries
/// integrated out: each realized entry gets a fresh `Beta(lambda1, lambda2)`
/// draw and its pairs get independent Bernoulli edges; incompatible pairs are
/// always non-edges.
///
/// This is the exact conditional `E | paths, levels` of the collapsed model,
/// used by the data-regeneration step of joint-distribution (Geweke) tests.
pub fn resample_edges<R: Rng + ?Sized>(
    paths: &PathAssignment,
    levels: &LevelAssignments,
    hyper: &Hyperparams,
    rng: &mut R,
) -> DirectedNetwork {
    let (network, _) = realize_edges(
        paths,
        levels,
        EntrySource::Prior {
            lambda1: hyper.lambda1,
            lambda2: hyper.lambda2,
        },
        rng,
    )
    .expect("sizes already validated");
    network
}
