//! Per-actor hierarchy paths.

use crate::error::{HmmsbError, Result};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

/// Branch label within one tree node, 1-based.
pub type Label = u16;

/// Interaction level, 1-based, at most the hierarchy depth.
pub type Level = u8;

/// Assignment of every actor to a depth-`K` path of branch labels.
///
/// Branch labels are canonical when, at every tree node, the children are
/// numbered `1..=d` in order of first visit by actor index. All sampler and
/// evaluation code keeps assignments canonical; [`PathAssignment::canonicalize`]
/// restores the property for externally loaded data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathAssignment {
    n: usize,
    depth: usize,
    labels: Vec<Label>,
}

impl PathAssignment {
    /// All actors on the path `(1, 1, ..., 1)`.
    pub fn trivial(n: usize, depth: usize) -> Self {
        PathAssignment {
            n,
            depth,
            labels: vec![1; n * depth],
        }
    }

    /// Builds from per-actor paths; every path must have length `depth` and
    /// positive labels. Labels need not be canonical.
    pub fn from_paths(paths: Vec<Vec<Label>>, depth: usize) -> Result<Self> {
        let n = paths.len();
        let mut labels = Vec::with_capacity(n * depth);
        for (i, p) in paths.iter().enumerate() {
            if p.len() != depth {
                return Err(HmmsbError::Config(format!(
                    "actor {i}: path has length {} but the hierarchy depth is {depth}",
                    p.len()
                )));
            }
            if p.contains(&0) {
                return Err(HmmsbError::Config(format!(
                    "actor {i}: branch labels must be positive"
                )));
            }
            labels.extend_from_slice(p);
        }
        Ok(PathAssignment { n, depth, labels })
    }

    pub fn n_actors(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn path(&self, actor: usize) -> &[Label] {
        &self.labels[actor * self.depth..(actor + 1) * self.depth]
    }

    pub fn set_path(&mut self, actor: usize, path: &[Label]) {
        assert_eq!(path.len(), self.depth);
        self.labels[actor * self.depth..(actor + 1) * self.depth].copy_from_slice(path);
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Label]> + '_ {
        (0..self.n).map(move |i| self.path(i))
    }

    /// Relabels branches to first-visit order by actor index, in place.
    pub fn canonicalize(&mut self) {
        // Maps (new parent prefix, old label) -> new label per tree node.
        let mut rename: FxHashMap<(SmallVec<[Label; 8]>, Label), Label> = FxHashMap::default();
        let mut n_children: FxHashMap<SmallVec<[Label; 8]>, Label> = FxHashMap::default();
        for actor in 0..self.n {
            let mut new_prefix: SmallVec<[Label; 8]> = SmallVec::new();
            for d in 0..self.depth {
                let old = self.labels[actor * self.depth + d];
                let new = *rename
                    .entry((new_prefix.clone(), old))
                    .or_insert_with(|| {
                        let c = n_children.entry(new_prefix.clone()).or_insert(0);
                        *c += 1;
                        *c
                    });
                self.labels[actor * self.depth + d] = new;
                new_prefix.push(new);
            }
        }
    }

    /// True when labels at every node form the contiguous first-visit range.
    pub fn is_canonical(&self) -> bool {
        let mut copy = self.clone();
        copy.canonicalize();
        copy == *self
    }

    /// Applies one relabel event: actors whose path starts with `prefix` and
    /// whose next label exceeds `removed` have that label shifted down by one.
    ///
    /// Used when a branch with higher-labeled siblings dies during sampling.
    pub(crate) fn shift_labels_after_removal(&mut self, prefix: &[Label], removed: Label) {
        let d = prefix.len();
        debug_assert!(d < self.depth);
        for actor in 0..self.n {
            let base = actor * self.depth;
            if &self.labels[base..base + d] == prefix && self.labels[base + d] > removed {
                self.labels[base + d] -= 1;
            }
        }
    }
}
