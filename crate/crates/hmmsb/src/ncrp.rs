//! Nested Chinese restaurant process over depth-`K` paths.
//!
//! Conditioned on the other actors' paths, an actor walks the existing tree
//! from the root: at a node holding `n` other actors it picks an existing
//! child `c` with probability `n_c / (n + gamma)` or a fresh branch with
//! probability `gamma / (n + gamma)`. A fresh choice forces fresh branches at
//! every deeper level, each with conditional probability one.

use crate::hyper::Hyperparams;
use crate::path::{Label, PathAssignment};
use crate::special::ln_gamma;
use crate::tree::HierarchyTree;
use rand::Rng;
use rustc_hash::FxHashMap;

/// Conditional choice weights at one node: per existing child `n_c / (n+g)`,
/// then the fresh-branch mass `gamma / (n+g)` as the final element.
pub fn crp_choice_probabilities(child_occupancies: &[u32], gamma: f64) -> Vec<f64> {
    let n: u32 = child_occupancies.iter().sum();
    let denom = n as f64 + gamma;
    let mut probs: Vec<f64> = child_occupancies
        .iter()
        .map(|&c| c as f64 / denom)
        .collect();
    probs.push(gamma / denom);
    probs
}

/// Samples one path conditioned on the occupants of `tree`; canonical labels
/// (a fresh branch takes the next unused label; levels below a fresh branch
/// are label 1). Does not modify the tree.
pub fn sample_path<R: Rng + ?Sized>(
    tree: &HierarchyTree,
    gamma: f64,
    rng: &mut R,
) -> Vec<Label> {
    let depth = tree.depth();
    let mut path = Vec::with_capacity(depth);
    let mut fresh = false;
    for _ in 0..depth {
        if fresh {
            path.push(1);
            continue;
        }
        let occ = tree.child_occupancies(&path);
        let probs = crp_choice_probabilities(&occ, gamma);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut choice = probs.len() - 1;
        for (c, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                choice = c;
                break;
            }
        }
        if choice == occ.len() {
            fresh = true;
            path.push((occ.len() + 1) as Label);
        } else {
            path.push((choice + 1) as Label);
        }
    }
    path
}

/// Log conditional probability of `path` given the occupants of `tree`.
///
/// `path` uses canonical labels relative to the tree: a fresh branch at a
/// node with `d` children carries label `d + 1`, and every level below a
/// fresh branch carries label 1.
pub fn log_path_conditional(tree: &HierarchyTree, path: &[Label], gamma: f64) -> f64 {
    debug_assert_eq!(path.len(), tree.depth());
    let mut log_p = 0.0;
    let mut prefix: Vec<Label> = Vec::with_capacity(path.len());
    for &label in path {
        let occ = tree.child_occupancies(&prefix);
        let n: u32 = occ.iter().sum();
        let denom = n as f64 + gamma;
        let pos = label as usize - 1;
        if pos < occ.len() {
            log_p += (occ[pos] as f64 / denom).ln();
        } else {
            assert!(
                pos == occ.len(),
                "path label {label} skips existing children at node {prefix:?}"
            );
            log_p += (gamma / denom).ln();
            // Every deeper level is a forced fresh branch with probability 1.
            break;
        }
        prefix.push(label);
    }
    log_p
}

/// All paths with positive conditional mass given `tree`, with their log
/// conditional probabilities: every fully realized path, plus one
/// fresh-completed candidate per realized prefix (including the root).
///
/// The probabilities sum to one: the candidates partition the support.
pub fn enumerate_candidates(tree: &HierarchyTree, gamma: f64) -> Vec<(Vec<Label>, f64)> {
    let depth = tree.depth();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Label>, f64)> = vec![(Vec::new(), 0.0)];
    while let Some((prefix, log_p)) = stack.pop() {
        if prefix.len() == depth {
            out.push((prefix, log_p));
            continue;
        }
        let occ = tree.child_occupancies(&prefix);
        let n: u32 = occ.iter().sum();
        let denom = n as f64 + gamma;
        // Fresh completion: next label here, label 1 at every deeper level.
        let mut fresh_path = prefix.clone();
        fresh_path.push((occ.len() + 1) as Label);
        fresh_path.resize(depth, 1);
        out.push((fresh_path, log_p + (gamma / denom).ln()));
        for (pos, &c) in occ.iter().enumerate() {
            let mut next = prefix.clone();
            next.push((pos + 1) as Label);
            stack.push((next, log_p + (c as f64 / denom).ln()));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Log prior of a full assignment. The process is exchangeable and depends
/// only on the occupancy structure, so this is computed per internal node as
/// a Chinese restaurant partition mass:
/// `gamma^B * prod_c Gamma(n_c) * Gamma(gamma) / Gamma(gamma + n)` for a node
/// of occupancy `n` whose `B` children have occupancies `n_c`. Labels may be
/// in any order (sampler states permute them as branches die).
pub fn log_assignment_prior(paths: &PathAssignment, gamma: f64) -> f64 {
    let mut occupancy: FxHashMap<&[Label], u32> = FxHashMap::default();
    for actor in 0..paths.n_actors() {
        let path = paths.path(actor);
        for t in 1..=path.len() {
            *occupancy.entry(&path[..t]).or_insert(0) += 1;
        }
    }
    let lg_gamma = ln_gamma(gamma);
    // Every realized non-root prefix is one table somewhere: a factor
    // `gamma * Gamma(occupancy)`.
    let mut log_p = (occupancy.len() as f64) * gamma.ln();
    for &n_c in occupancy.values() {
        log_p += ln_gamma(f64::from(n_c));
    }
    // Every restaurant contributes its normalizer `Gamma(gamma) /
    // Gamma(gamma + customers)`: the root seats all actors, and each
    // realized internal prefix seats its occupants.
    log_p += lg_gamma - ln_gamma(gamma + paths.n_actors() as f64);
    for (prefix, &occ) in &occupancy {
        if prefix.len() < paths.depth() {
            log_p += lg_gamma - ln_gamma(gamma + f64::from(occ));
        }
    }
    log_p
}

/// Samples a full canonical assignment for `n` actors from the prior.
pub fn sample_assignment<R: Rng + ?Sized>(
    n: usize,
    hyper: &Hyperparams,
    rng: &mut R,
) -> PathAssignment {
    let mut tree = HierarchyTree::new(hyper.max_depth);
    let mut paths = PathAssignment::trivial(n, hyper.max_depth);
    for actor in 0..n {
        let path = sample_path(&tree, hyper.gamma, rng);
        tree.add_path(&path);
        paths.set_path(actor, &path);
    }
    paths
}
