//! Single-site level indicator updates.

use super::SamplerState;
use crate::gem;
use crate::levels::Direction;
use crate::path::Level;
use crate::stats::{resolve_sb, Resolution};
use rand::Rng;

impl SamplerState {
    /// Removes pair `(i, j)` from the edge counts and its `dir` indicator
    /// from the owner's level tallies. Inverse of `attach_level`.
    fn detach_level(&mut self, i: usize, j: usize, dir: Direction) {
        let edge = self.network.edge(i, j);
        if let Resolution::Entry(key) = self.resolve_pair(i, j) {
            self.stats.remove(&key, edge);
        }
        let owner = match dir {
            Direction::Donor => i,
            Direction::Receiver => j,
        };
        let current = self.levels.get(i, j, dir);
        self.level_counts[owner * self.hyper.max_depth + current as usize - 1] -= 1;
    }

    fn attach_level(&mut self, i: usize, j: usize, dir: Direction, value: Level) {
        self.levels.set(i, j, dir, value);
        let owner = match dir {
            Direction::Donor => i,
            Direction::Receiver => j,
        };
        self.level_counts[owner * self.hyper.max_depth + value as usize - 1] += 1;
        if let Resolution::Entry(key) = self.resolve_pair(i, j) {
            self.stats.add(key, self.network.edge(i, j));
        }
    }

    /// Unnormalized conditional weights over levels `1..=K` for the `dir`
    /// indicator of pair `(i, j)`, which must already be detached.
    ///
    /// Each weight is the stick-breaking predictive for the owning actor
    /// times the collapsed edge likelihood: `(ones + l1) / (total + l1 + l2)`
    /// for an observed edge landing in a compatible entry, the mirrored
    /// ratio for a non-edge, and the indicator `1 - E` when the candidate
    /// level makes the pair incompatible. All counts exclude the pair.
    fn detached_level_weights(&self, i: usize, j: usize, dir: Direction) -> Vec<f64> {
        let depth = self.hyper.max_depth;
        let edge = self.network.edge(i, j);
        let owner = match dir {
            Direction::Donor => i,
            Direction::Receiver => j,
        };
        let row = owner * depth;
        let mut weights = gem::predictive_weights(
            self.hyper.gem_a(),
            self.hyper.gem_b(),
            &self.level_counts[row..row + depth],
        );

        let other = match dir {
            Direction::Donor => self.levels.receiver(i, j),
            Direction::Receiver => self.levels.donor(i, j),
        };
        let denom_base = self.hyper.lambda1 + self.hyper.lambda2;
        for (slot, w) in weights.iter_mut().enumerate() {
            let k = (slot + 1) as Level;
            let (z_donor, z_receiver) = match dir {
                Direction::Donor => (k, other),
                Direction::Receiver => (other, k),
            };
            let likelihood = match resolve_sb(
                self.paths.path(i),
                self.paths.path(j),
                z_donor,
                z_receiver,
            ) {
                Resolution::Incompatible => {
                    if edge {
                        0.0
                    } else {
                        1.0
                    }
                }
                Resolution::Entry(key) => {
                    let counts = self.stats.get(&key);
                    let denom = f64::from(counts.total()) + denom_base;
                    if edge {
                        (f64::from(counts.ones) + self.hyper.lambda1) / denom
                    } else {
                        (f64::from(counts.zeros) + self.hyper.lambda2) / denom
                    }
                }
            };
            *w *= likelihood;
        }
        weights
    }

    /// Resamples one level indicator from its full conditional.
    pub fn sample_level<R: Rng + ?Sized>(
        &mut self,
        i: usize,
        j: usize,
        dir: Direction,
        rng: &mut R,
    ) {
        if self.hyper.max_depth == 1 {
            return;
        }
        self.detach_level(i, j, dir);
        let weights = self.detached_level_weights(i, j, dir);
        let total: f64 = weights.iter().sum();
        // Level 1 is compatible for every pair and both its factors are
        // strictly positive, so the mass never vanishes.
        assert!(
            total.is_finite() && total > 0.0,
            "level conditional has no mass for pair ({i}, {j})"
        );
        let mut u = rng.random::<f64>() * total;
        let mut chosen = weights.len();
        for (slot, w) in weights.iter().enumerate() {
            u -= w;
            if u <= 0.0 {
                chosen = slot + 1;
                break;
            }
        }
        self.attach_level(i, j, dir, chosen as Level);
    }

    /// Normalized conditional distribution of one indicator given everything
    /// else, exactly as `sample_level` draws it. Exposed for exactness tests
    /// against brute-force enumeration of the joint.
    pub fn level_conditional(&self, i: usize, j: usize, dir: Direction) -> Vec<f64> {
        let mut probe = self.clone();
        probe.detach_level(i, j, dir);
        let mut weights = probe.detached_level_weights(i, j, dir);
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        weights
    }
}
