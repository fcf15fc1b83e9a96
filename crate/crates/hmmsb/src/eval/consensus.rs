//! Consensus post-processing of posterior samples.

use crate::levels::{Direction, LevelAssignments};
use crate::path::{Label, Level, PathAssignment};

/// Co-assignment frequencies across samples: `get(k, i, j)` is the fraction
/// of samples in which actors `i` and `j` share their length-`k` prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct Coassignment {
    n: usize,
    depth: usize,
    freq: Vec<f64>,
}

impl Coassignment {
    pub fn n_actors(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Frequency at level `k` (1-based); the diagonal is always 1.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        assert!(k >= 1 && k <= self.depth);
        self.freq[(k - 1) * self.n * self.n + i * self.n + j]
    }
}

/// Builds the co-assignment tensor from path samples.
pub fn coassignment(samples: &[PathAssignment]) -> Coassignment {
    assert!(!samples.is_empty(), "consensus needs at least one sample");
    let n = samples[0].n_actors();
    let depth = samples[0].depth();
    let mut counts = vec![0u32; depth * n * n];
    for s in samples {
        assert_eq!(s.n_actors(), n);
        assert_eq!(s.depth(), depth);
        for i in 0..n {
            for j in 0..n {
                let (pi, pj) = (s.path(i), s.path(j));
                for k in 1..=depth {
                    if pi[..k] == pj[..k] {
                        counts[(k - 1) * n * n + i * n + j] += 1;
                    } else {
                        break;
                    }
                }
            }
        }
    }
    let total = samples.len() as f64;
    Coassignment {
        n,
        depth,
        freq: counts.into_iter().map(|c| f64::from(c) / total).collect(),
    }
}

/// Consensus hierarchy plus the evidence it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusResult {
    pub consensus_paths: PathAssignment,
    pub level_modes: LevelAssignments,
    pub coassignment: Coassignment,
}

/// Connected components of the `> 0.5` co-assignment graph at one level,
/// restricted to `members`; components come out ordered by smallest member.
fn components(co: &Coassignment, k: usize, members: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; members.len()];
    let mut out = Vec::new();
    for start in 0..members.len() {
        if seen[start] {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = vec![start];
        seen[start] = true;
        while let Some(pos) = queue.pop() {
            component.push(members[pos]);
            for other in 0..members.len() {
                if !seen[other] && co.get(k, members[pos], members[other]) > 0.5 {
                    seen[other] = true;
                    queue.push(other);
                }
            }
        }
        component.sort_unstable();
        out.push(component);
    }
    out.sort_by_key(|c| c[0]);
    out
}

/// Builds the consensus hierarchy: at each level, actors whose co-assignment
/// frequency exceeds one half are linked and the connected components become
/// communities, nested top-down.
///
/// Deeper agreement implies shallower agreement, so each level's graph is a
/// subgraph of the previous level's and the components nest; the result is
/// always a valid hierarchy. Transitive closure via components is a
/// convention: pairwise majority agreement alone is not transitive.
pub fn consensus_paths(samples: &[PathAssignment]) -> (PathAssignment, Coassignment) {
    let co = coassignment(samples);
    let n = co.n_actors();
    let depth = co.depth();
    let mut paths = PathAssignment::trivial(n, depth);
    // Groups at the current level, each to be split independently below.
    let mut groups: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut prefixes: Vec<Vec<Label>> = vec![Vec::new()];
    for k in 1..=depth {
        let mut next_groups = Vec::new();
        let mut next_prefixes = Vec::new();
        for (group, prefix) in groups.iter().zip(&prefixes) {
            for (child_idx, component) in components(&co, k, group).into_iter().enumerate() {
                let mut child_prefix = prefix.clone();
                child_prefix.push(child_idx as Label + 1);
                for &actor in &component {
                    paths.set_path(
                        actor,
                        &[&child_prefix[..], &vec![1; depth - k][..]].concat(),
                    );
                }
                next_groups.push(component);
                next_prefixes.push(child_prefix);
            }
        }
        groups = next_groups;
        prefixes = next_prefixes;
    }
    (paths, co)
}

/// Per-indicator majority across samples, ties toward the coarser level.
pub fn mode_levels(samples: &[LevelAssignments]) -> LevelAssignments {
    assert!(!samples.is_empty(), "mode needs at least one sample");
    let n = samples[0].n_actors();
    let mut out = LevelAssignments::ones(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for dir in [Direction::Donor, Direction::Receiver] {
                let mut counts = [0u32; 256];
                for s in samples {
                    counts[s.get(i, j, dir) as usize] += 1;
                }
                let mode = counts
                    .iter()
                    .enumerate()
                    .skip(1)
                    .max_by_key(|&(level, &c)| (c, usize::MAX - level))
                    .map(|(level, _)| level as Level)
                    .unwrap();
                out.set(i, j, dir, mode);
            }
        }
    }
    out
}

/// Full consensus: paths, level modes, and the co-assignment evidence.
pub fn consensus(
    path_samples: &[PathAssignment],
    level_samples: &[LevelAssignments],
) -> ConsensusResult {
    assert_eq!(path_samples.len(), level_samples.len());
    let (consensus_paths, coassignment) = self::consensus_paths(path_samples);
    ConsensusResult {
        consensus_paths,
        level_modes: mode_levels(level_samples),
        coassignment,
    }
}

/// Merges bottom-level communities of at most `min_size` actors under each
/// parent into a single community. Parents with at most one small child are
/// left untouched; everything above the bottom level is preserved.
pub fn merge_small_communities(paths: &PathAssignment, min_size: usize) -> PathAssignment {
    let n = paths.n_actors();
    let depth = paths.depth();
    let mut out = paths.clone();
    if depth == 0 || n == 0 {
        return out;
    }
    // Group actors by parent prefix (all but the last coordinate).
    let mut by_parent: std::collections::BTreeMap<Vec<Label>, Vec<usize>> =
        std::collections::BTreeMap::new();
    for actor in 0..n {
        by_parent
            .entry(paths.path(actor)[..depth - 1].to_vec())
            .or_default()
            .push(actor);
    }
    for (_parent, members) in by_parent {
        let mut sizes: std::collections::BTreeMap<Label, usize> = std::collections::BTreeMap::new();
        for &actor in &members {
            *sizes.entry(paths.path(actor)[depth - 1]).or_insert(0) += 1;
        }
        let small: Vec<Label> = sizes
            .iter()
            .filter(|&(_, &size)| size <= min_size)
            .map(|(&label, _)| label)
            .collect();
        if small.len() < 2 {
            continue;
        }
        // All small children collapse onto the first small label; the result
        // is canonicalized at the end to close label gaps.
        let target = small[0];
        for &actor in &members {
            let label = paths.path(actor)[depth - 1];
            if small.contains(&label) {
                let mut p = paths.path(actor).to_vec();
                p[depth - 1] = target;
                out.set_path(actor, &p);
            }
        }
    }
    out.canonicalize();
    out
}
