//! Shared helpers for integration tests.

#![allow(dead_code)]

use hmmsb::eval::F1Report;
use hmmsb::gibbs::complete_log_likelihood_parts;
use hmmsb::levels::Direction;
use hmmsb::path::Level;
use hmmsb::{DirectedNetwork, Hyperparams, Label, LevelAssignments, PathAssignment};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::HashMap;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Applies independent label bijections at every tree position: level-1
/// labels globally, level-2 labels within each level-1 branch, and so on.
/// Prefix equality, and therefore pair scoring, is untouched.
pub fn permute_labels(paths: &PathAssignment, r: &mut ChaCha12Rng) -> PathAssignment {
    let depth = paths.depth();
    let mut maps: HashMap<Vec<Label>, HashMap<Label, Label>> = HashMap::new();
    for actor in 0..paths.n_actors() {
        let path = paths.path(actor);
        for t in 0..depth {
            maps.entry(path[..t].to_vec())
                .or_default()
                .entry(path[t])
                .or_insert(0);
        }
    }
    for table in maps.values_mut() {
        let labels: Vec<Label> = table.keys().copied().collect();
        let mut shuffled: Vec<Label> = (1..=labels.len() as Label).map(|l| l + 7).collect();
        shuffled.shuffle(r);
        for (k, &old) in labels.iter().enumerate() {
            table.insert(old, shuffled[k]);
        }
    }
    let new_paths = (0..paths.n_actors())
        .map(|actor| {
            let path = paths.path(actor);
            (0..depth)
                .map(|t| maps[&path[..t].to_vec()][&path[t]])
                .collect()
        })
        .collect();
    PathAssignment::from_paths(new_paths, depth).unwrap()
}

/// A uniformly random (not necessarily canonical) assignment with labels
/// in `1..=3` at every level.
pub fn random_assignment(n: usize, depth: usize, r: &mut ChaCha12Rng) -> PathAssignment {
    let paths = (0..n)
        .map(|_| (0..depth).map(|_| r.random_range(1..=3) as Label).collect())
        .collect();
    PathAssignment::from_paths(paths, depth).unwrap()
}

/// Bit-exact equality of two score reports, pair counts included.
pub fn assert_reports_equal(a: &F1Report, b: &F1Report, case: usize) {
    assert_eq!(a.total.to_bits(), b.total.to_bits(), "case {case}: totals differ");
    for (x, y) in a.per_level.iter().zip(&b.per_level) {
        assert_eq!(
            (x.tp, x.fp, x.fn_, x.tn),
            (y.tp, y.fp, y.fn_, y.tn),
            "case {case}: pair counts differ at level {}",
            x.level
        );
        assert_eq!(x.f1.to_bits(), y.f1.to_bits(), "case {case}: F1 differs");
    }
}

/// A random network on `n` actors with independent edge probability `p`.
pub fn random_network<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> DirectedNetwork {
    let mut net = DirectedNetwork::new(n).unwrap();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p {
                net.set_edge(i, j, true);
            }
        }
    }
    net
}

/// All canonical path assignments for `n` actors at depth `k`.
///
/// Canonical means first-visit label order, so each unlabeled hierarchy
/// appears exactly once; these index the support of the nested CRP.
pub fn enumerate_canonical_paths(n: usize, k: usize) -> Vec<PathAssignment> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<u16>> = Vec::new();
    fn recurse(n: usize, k: usize, current: &mut Vec<Vec<u16>>, out: &mut Vec<PathAssignment>) {
        if current.len() == n {
            out.push(PathAssignment::from_paths(current.clone(), k).unwrap());
            return;
        }
        // Candidate paths for the next actor: every choice that keeps the
        // assignment canonical (at each node, labels up to first-unused).
        let mut candidates: Vec<Vec<u16>> = vec![Vec::new()];
        for depth in 0..k {
            let mut next = Vec::new();
            for prefix in &candidates {
                let mut realized = false;
                let mut max_label = 0u16;
                for path in current.iter() {
                    if path[..depth] == prefix[..] {
                        realized = true;
                        max_label = max_label.max(path[depth]);
                    }
                }
                // Realized node: existing labels plus one fresh; a node on
                // a fresh branch forces label 1 at every deeper level.
                let top = if realized { max_label + 1 } else { 1 };
                for label in 1..=top {
                    let mut p = prefix.clone();
                    p.push(label);
                    next.push(p);
                }
            }
            candidates = next;
        }
        for cand in candidates {
            current.push(cand);
            recurse(n, k, current, out);
            current.pop();
        }
    }
    recurse(n, k, &mut current, &mut out);
    out
}

/// All level assignments for `n` actors at depth `k`: every combination of
/// the `2 n (n-1)` indicator sites over values `1..=k`.
pub fn enumerate_level_assignments(n: usize, k: usize) -> Vec<LevelAssignments> {
    let sites = 2 * n * (n - 1);
    let mut out = Vec::new();
    let mut values = vec![1 as Level; sites];
    loop {
        let donor = &values[..sites / 2];
        let receiver = &values[sites / 2..];
        out.push(LevelAssignments::from_sequences(n, donor, receiver).unwrap());
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == sites {
                return out;
            }
            if values[pos] < k as Level {
                values[pos] += 1;
                break;
            }
            values[pos] = 1;
            pos += 1;
        }
    }
}

/// Joint log density of a full state.
pub fn log_joint(
    net: &DirectedNetwork,
    paths: &PathAssignment,
    levels: &LevelAssignments,
    hyper: &Hyperparams,
) -> f64 {
    complete_log_likelihood_parts(net, paths, levels, hyper).total()
}

/// Exact log marginal likelihood by brute force: sums the collapsed edge
/// likelihood over every canonical path assignment and every level
/// assignment, weighted by their priors. Feasible only for tiny networks.
pub fn exact_marginal_by_enumeration(net: &DirectedNetwork, hyper: &Hyperparams) -> f64 {
    let n = net.n_actors();
    let k = hyper.max_depth;
    let block_prior = hmmsb::gem::LevelBlockPrior::new(
        hyper.gem_a(),
        hyper.gem_b(),
        k,
        2 * (n - 1),
    );
    let mut terms = Vec::new();
    for paths in enumerate_canonical_paths(n, k) {
        let log_path_prior = hmmsb::ncrp::log_assignment_prior(&paths, hyper.gamma);
        for levels in enumerate_level_assignments(n, k) {
            let mut log_level_prior = 0.0;
            for a in 0..n {
                let mut counts = vec![0u32; k];
                for z in levels.actor_indicators(a) {
                    counts[z as usize - 1] += 1;
                }
                log_level_prior +=
                    block_prior.log_prob_sequence(hyper.gem_a(), hyper.gem_b(), &counts);
            }
            let edges = complete_log_likelihood_parts(net, &paths, &levels, hyper).edges;
            terms.push(log_path_prior + log_level_prior + edges);
        }
    }
    hmmsb::special::log_sum_exp(&terms)
}

/// Total variation distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p
        .iter()
        .zip(q)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
///
/// The sup of |F1 - F2| is taken over jump points only: tied values are
/// consumed from both samples before the gap is measured, so heavily tied
/// (discrete) statistics do not inflate the distance.
pub fn ks_two_sample_p(xs: &mut [f64], ys: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        let f1 = i as f64 / n;
        let f2 = j as f64 / m;
        d = d.max((f1 - f2).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    // Kolmogorov distribution tail series.
    let mut p = 0.0;
    for k in 1..=100 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Direction values for iterating both indicator kinds.
pub const BOTH_DIRECTIONS: [Direction; 2] = [Direction::Donor, Direction::Receiver];
