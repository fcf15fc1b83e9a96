//! Collapsed joint density of `(E, c, z)` with memberships and blockmodel
//! entries integrated out.

use super::SamplerState;
use crate::gem::{self, LevelBlockPrior};
use crate::hyper::Hyperparams;
use crate::levels::LevelAssignments;
use crate::ncrp;
use crate::network::DirectedNetwork;
use crate::path::PathAssignment;
use crate::special::ln_beta;
use crate::stats::CompatibilityStats;

/// Additive pieces of the collapsed joint log density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihoodParts {
    /// `sum over entries of ln B(ones + l1, zeros + l2) - ln B(l1, l2)`;
    /// negative infinity when an edge sits on an incompatible pair.
    pub edges: f64,
    /// Nested CRP log prior of the path assignment.
    pub paths: f64,
    /// Depth-conditioned stick-breaking log prior of all level indicators.
    pub levels: f64,
}

impl LogLikelihoodParts {
    pub fn total(&self) -> f64 {
        self.edges + self.paths + self.levels
    }
}

fn edge_part(stats: &CompatibilityStats, lambda1: f64, lambda2: f64) -> f64 {
    let base = ln_beta(lambda1, lambda2);
    stats
        .iter()
        .map(|(_, c)| ln_beta(f64::from(c.ones) + lambda1, f64::from(c.zeros) + lambda2) - base)
        .sum()
}

/// Joint log density computed from scratch. Used by enumeration oracles and
/// consistency tests; chains use the incremental method below.
pub fn complete_log_likelihood_parts(
    network: &DirectedNetwork,
    paths: &PathAssignment,
    levels: &LevelAssignments,
    hyper: &Hyperparams,
) -> LogLikelihoodParts {
    let (stats, _, incompatible_ones) = CompatibilityStats::recount(network, paths, levels);
    let edges = if incompatible_ones > 0 {
        f64::NEG_INFINITY
    } else {
        edge_part(&stats, hyper.lambda1, hyper.lambda2)
    };
    let paths_part = ncrp::log_assignment_prior(paths, hyper.gamma);
    let n = network.n_actors();
    let levels_part = if n > 1 {
        let prior = LevelBlockPrior::new(hyper.gem_a(), hyper.gem_b(), hyper.max_depth, 2 * (n - 1));
        let norm = prior.log_normalizer();
        (0..n)
            .map(|a| {
                let mut counts = vec![0u32; hyper.max_depth];
                for z in levels.actor_indicators(a) {
                    counts[z as usize - 1] += 1;
                }
                gem::log_block_weight(hyper.gem_a(), hyper.gem_b(), &counts) - norm
            })
            .sum()
    } else {
        0.0
    };
    LogLikelihoodParts {
        edges,
        paths: paths_part,
        levels: levels_part,
    }
}

impl SamplerState {
    /// Collapsed joint log density of the current state, using the
    /// incrementally maintained statistics.
    pub fn complete_log_likelihood(&self) -> f64 {
        let ones_in_entries: u64 = self.stats.iter().map(|(_, c)| u64::from(c.ones)).sum();
        // Every observed edge must sit in some compatible entry; a shortfall
        // means an edge-carrying incompatible pair, which has density zero.
        if ones_in_entries < self.network.edge_count() as u64 {
            return f64::NEG_INFINITY;
        }
        let edges = edge_part(&self.stats, self.hyper.lambda1, self.hyper.lambda2);
        let paths_part = ncrp::log_assignment_prior(&self.paths, self.hyper.gamma);
        let depth = self.hyper.max_depth;
        let n = self.network.n_actors();
        let levels_part: f64 = (0..n)
            .map(|a| {
                let row = &self.level_counts[a * depth..(a + 1) * depth];
                gem::log_block_weight(self.hyper.gem_a(), self.hyper.gem_b(), row)
                    - self.gem_log_norm
            })
            .sum();
        edges + paths_part + levels_part
    }
}
