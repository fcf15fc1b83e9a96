//! Per-actor path resampling.

use super::SamplerState;
use crate::ncrp;
use crate::path::{Label, Level};
use crate::special::ln_beta;
use crate::stats::{EntryKey, Resolution};
use rand::Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

/// Incident pairs of the actor being moved, grouped by everything that
/// determines their entry resolution except the actor's own path: the other
/// endpoint's path truncated at the coarse level, the coarse level itself,
/// and which side the moving actor is on. Pairs in one group resolve
/// identically for every candidate path, so likelihood scoring touches each
/// group once instead of each pair.
struct IncidentGroup {
    prefix: SmallVec<[Label; 8]>,
    z_coarse: Level,
    moving_actor_donates: bool,
    ones: u32,
    zeros: u32,
}

/// Grouping key for [`IncidentGroup`] during aggregation.
type GroupKey = (SmallVec<[Label; 8]>, Level, bool);

impl SamplerState {
    /// Removes all of actor `i`'s incident pairs from the edge counts.
    fn detach_incident_pairs(&mut self, i: usize) {
        let n = self.network.n_actors();
        for j in 0..n {
            if j == i {
                continue;
            }
            for (s, d) in [(i, j), (j, i)] {
                if let Resolution::Entry(key) = self.resolve_pair(s, d) {
                    self.stats.remove(&key, self.network.edge(s, d));
                }
            }
        }
    }

    /// Re-adds all of actor `i`'s incident pairs under its current path.
    fn attach_incident_pairs(&mut self, i: usize) {
        let n = self.network.n_actors();
        for j in 0..n {
            if j == i {
                continue;
            }
            for (s, d) in [(i, j), (j, i)] {
                if let Resolution::Entry(key) = self.resolve_pair(s, d) {
                    self.stats.add(key, self.network.edge(s, d));
                }
            }
        }
    }

    /// Groups actor `i`'s incident pairs after detachment. Uses the other
    /// endpoints' current (post-relabel) paths and the current levels.
    fn incident_groups(&self, i: usize) -> Vec<IncidentGroup> {
        let n = self.network.n_actors();
        let mut map: FxHashMap<GroupKey, (u32, u32)> = FxHashMap::default();
        for j in 0..n {
            if j == i {
                continue;
            }
            for (donates, (s, d)) in [(true, (i, j)), (false, (j, i))] {
                let z_c = self.levels.donor(s, d).min(self.levels.receiver(s, d));
                let prefix: SmallVec<[Label; 8]> =
                    SmallVec::from_slice(&self.paths.path(j)[..z_c as usize]);
                let slot = map.entry((prefix, z_c, donates)).or_insert((0, 0));
                if self.network.edge(s, d) {
                    slot.0 += 1;
                } else {
                    slot.1 += 1;
                }
            }
        }
        map.into_iter()
            .map(|((prefix, z_coarse, moving_actor_donates), (ones, zeros))| IncidentGroup {
                prefix,
                z_coarse,
                moving_actor_donates,
                ones,
                zeros,
            })
            .collect()
    }

    /// Collapsed log-likelihood of actor `i`'s incident pairs if its path
    /// were `candidate`: the product over touched entries of the Beta
    /// posterior-predictive ratio, with entry counts (exclusive of all
    /// incident pairs) taken from the current statistics.
    ///
    /// Returns `None` when some edge-carrying group resolves incompatible
    /// (probability zero). With `repair` set, such groups contribute a
    /// neutral factor instead; this is only used to escape states that
    /// are already outside the model's support (possible before the first
    /// sweep over observed data), where every candidate would otherwise
    /// have probability zero.
    fn candidate_log_likelihood(
        &self,
        candidate: &[Label],
        groups: &[IncidentGroup],
        scratch: &mut FxHashMap<EntryKey, (u32, u32)>,
        repair: bool,
    ) -> Option<f64> {
        scratch.clear();
        for g in groups {
            let parent_len = g.z_coarse as usize - 1;
            if candidate[..parent_len] == g.prefix[..parent_len] {
                let key = if g.moving_actor_donates {
                    EntryKey::new(&g.prefix[..parent_len], candidate[parent_len], g.prefix[parent_len])
                } else {
                    EntryKey::new(&g.prefix[..parent_len], g.prefix[parent_len], candidate[parent_len])
                };
                let slot = scratch.entry(key).or_insert((0, 0));
                slot.0 += g.ones;
                slot.1 += g.zeros;
            } else if g.ones > 0 && !repair {
                return None;
            }
        }
        let l1 = self.hyper.lambda1;
        let l2 = self.hyper.lambda2;
        let mut ll = 0.0;
        for (key, (r, s)) in scratch.iter() {
            let base = self.stats.get(key);
            let g = f64::from(base.ones) + l1;
            let h = f64::from(base.zeros) + l2;
            ll += ln_beta(g + f64::from(*r), h + f64::from(*s)) - ln_beta(g, h);
        }
        Some(ll)
    }

    /// Resamples actor `i`'s path from its full conditional: the nested CRP
    /// conditional over realized paths plus fresh branches, times the
    /// collapsed likelihood of the actor's incident pairs.
    pub fn sample_path<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) {
        self.detach_incident_pairs(i);
        let old = self.paths.path(i).to_vec();
        if let Some(event) = self.tree.remove_path(&old) {
            self.paths
                .shift_labels_after_removal(&event.parent_prefix, event.removed_label);
            self.stats
                .apply_relabel(&event.parent_prefix, event.removed_label);
        }

        let candidates = ncrp::enumerate_candidates(&self.tree, self.hyper.gamma);
        let groups = self.incident_groups(i);
        let mut scratch = FxHashMap::default();
        let mut scores = Vec::with_capacity(candidates.len());
        for (cand, log_prior) in &candidates {
            match self.candidate_log_likelihood(cand, &groups, &mut scratch, false) {
                Some(ll) => scores.push(log_prior + ll),
                None => scores.push(f64::NEG_INFINITY),
            }
        }

        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            // Every candidate clashes with an observed edge. From a state
            // inside the model's support a structure-preserving candidate
            // always scores finitely, so this branch is reachable only from
            // an invalid initial state; rescore ignoring the clashes and let
            // the next level sweep finish the repair.
            for (idx, (cand, log_prior)) in candidates.iter().enumerate() {
                let ll = self
                    .candidate_log_likelihood(cand, &groups, &mut scratch, true)
                    .expect("repair scoring is total");
                scores[idx] = log_prior + ll;
            }
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut chosen = candidates.len() - 1;
        for (idx, w) in weights.iter().enumerate() {
            u -= w;
            if u <= 0.0 {
                chosen = idx;
                break;
            }
        }

        let new_path = &candidates[chosen].0;
        self.tree.add_path(new_path);
        self.paths.set_path(i, new_path);
        self.attach_incident_pairs(i);
    }

    /// Normalized conditional over candidate paths for actor `i`, exactly as
    /// `sample_path` draws it. Exposed for exactness tests against
    /// brute-force enumeration of the joint.
    pub fn path_conditional(&self, i: usize) -> PathConditional {
        let mut probe = self.clone();
        probe.detach_incident_pairs(i);
        let old = probe.paths.path(i).to_vec();
        if let Some(event) = probe.tree.remove_path(&old) {
            probe
                .paths
                .shift_labels_after_removal(&event.parent_prefix, event.removed_label);
            probe
                .stats
                .apply_relabel(&event.parent_prefix, event.removed_label);
        }
        let candidates = ncrp::enumerate_candidates(&probe.tree, probe.hyper.gamma);
        let groups = probe.incident_groups(i);
        let mut scratch = FxHashMap::default();
        let mut scores = Vec::with_capacity(candidates.len());
        for (cand, log_prior) in &candidates {
            match probe.candidate_log_likelihood(cand, &groups, &mut scratch, false) {
                Some(ll) => scores.push(log_prior + ll),
                None => scores.push(f64::NEG_INFINITY),
            }
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        let candidates = candidates
            .into_iter()
            .zip(weights)
            .map(|((cand, _), p)| (cand, p))
            .collect();
        PathConditional {
            candidates,
            context: probe.paths,
        }
    }
}

/// A path conditional together with the label space it lives in.
#[derive(Debug, Clone)]
pub struct PathConditional {
    /// Candidate paths with normalized probabilities, in post-detach labels.
    pub candidates: Vec<(Vec<Label>, f64)>,
    /// All actors' paths in the same label space; the moving actor's slot
    /// still holds its stale pre-detach path and must be overwritten with a
    /// candidate before evaluating any joint density.
    pub context: crate::path::PathAssignment,
}
