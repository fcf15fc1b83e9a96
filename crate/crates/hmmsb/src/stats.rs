//! Blockmodel entry resolution and collapsed sufficient statistics.
//!
//! Each ordered pair `(i, j)` interacts at the coarser of its two endpoint
//! levels, `z_c = min(z_donor, z_recv)`. When the two paths share the same
//! length-`(z_c - 1)` prefix, the pair is governed by the blockmodel entry
//! keyed by that shared parent plus the two child branches at level `z_c`;
//! otherwise the pair is incompatible and its edge probability is exactly
//! zero. With the Beta-distributed entries integrated out, the sampler only
//! needs, per realized entry, the number of present and absent edges assigned
//! to it; [`CompatibilityStats`] maintains those counts incrementally.

use crate::levels::Direction;
use crate::network::DirectedNetwork;
use crate::path::{Label, Level, PathAssignment};
use crate::LevelAssignments;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

/// Identifies one blockmodel entry: the shared parent prefix (length
/// `level - 1`), the donor-side child branch, and the receiver-side child
/// branch at `level`.
///
/// Stored as `parent ++ [donor_child, receiver_child]`, so the level is the
/// stored length minus one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntryKey {
    labels: SmallVec<[Label; 8]>,
}

impl EntryKey {
    pub fn new(parent: &[Label], donor_child: Label, receiver_child: Label) -> Self {
        let mut labels = SmallVec::with_capacity(parent.len() + 2);
        labels.extend_from_slice(parent);
        labels.push(donor_child);
        labels.push(receiver_child);
        EntryKey { labels }
    }

    pub fn level(&self) -> Level {
        (self.labels.len() - 1) as Level
    }

    pub fn parent(&self) -> &[Label] {
        &self.labels[..self.labels.len() - 2]
    }

    pub fn donor_child(&self) -> Label {
        self.labels[self.labels.len() - 2]
    }

    pub fn receiver_child(&self) -> Label {
        self.labels[self.labels.len() - 1]
    }

    /// True for entries on the blockmodel diagonal (both endpoints in the
    /// same child branch).
    pub fn is_diagonal(&self) -> bool {
        self.donor_child() == self.receiver_child()
    }

    /// Rewrites the key for a relabel event: under `prefix`, labels greater
    /// than `removed` shift down by one. Positions at depth `prefix.len()`
    /// include the parent continuation and, when the parent IS the prefix,
    /// both child slots.
    pub(crate) fn shifted_after_removal(&self, prefix: &[Label], removed: Label) -> Option<Self> {
        let d = prefix.len();
        let parent = self.parent();
        let mut out = self.clone();
        if parent.len() > d {
            if &parent[..d] == prefix && parent[d] > removed {
                out.labels[d] -= 1;
                return Some(out);
            }
            return None;
        }
        if parent.len() == d && parent == prefix {
            let len = out.labels.len();
            let mut changed = false;
            for slot in [len - 2, len - 1] {
                if out.labels[slot] > removed {
                    out.labels[slot] -= 1;
                    changed = true;
                }
            }
            return changed.then_some(out);
        }
        None
    }
}

/// Outcome of resolving a pair against the blockmodel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Entry(EntryKey),
    /// The endpoint paths diverge above the interaction level; the edge
    /// probability is identically zero.
    Incompatible,
}

impl Resolution {
    pub fn entry(&self) -> Option<&EntryKey> {
        match self {
            Resolution::Entry(k) => Some(k),
            Resolution::Incompatible => None,
        }
    }

    pub fn is_incompatible(&self) -> bool {
        matches!(self, Resolution::Incompatible)
    }
}

/// Resolves the blockmodel entry governing a directed pair.
///
/// `c_donor` and `c_recv` are the endpoint paths; `z_donor` and `z_recv` the
/// endpoint levels (1-based). The interaction level is `min(z_donor, z_recv)`
/// and both paths must be at least that long.
pub fn resolve_sb(
    c_donor: &[Label],
    c_recv: &[Label],
    z_donor: Level,
    z_recv: Level,
) -> Resolution {
    let z_c = z_donor.min(z_recv) as usize;
    debug_assert!(z_c >= 1, "levels are 1-based");
    assert!(
        c_donor.len() >= z_c && c_recv.len() >= z_c,
        "paths shorter than the interaction level: |c_donor|={}, |c_recv|={}, level={z_c}",
        c_donor.len(),
        c_recv.len()
    );
    let parent = &c_donor[..z_c - 1];
    if parent != &c_recv[..z_c - 1] {
        return Resolution::Incompatible;
    }
    Resolution::Entry(EntryKey::new(parent, c_donor[z_c - 1], c_recv[z_c - 1]))
}

/// Edge counts assigned to one blockmodel entry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeCounts {
    pub ones: u32,
    pub zeros: u32,
}

impl EdgeCounts {
    pub fn total(&self) -> u32 {
        self.ones + self.zeros
    }
}

/// Incremental per-entry edge counts for all compatible pairs.
///
/// Entries with no assigned pairs are pruned, so iteration visits exactly the
/// realized entries. Removing an observation that was never added is an
/// internal consistency fault and aborts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompatibilityStats {
    map: FxHashMap<EntryKey, EdgeCounts>,
    total: u64,
}

impl CompatibilityStats {
    pub fn new() -> Self {
        CompatibilityStats::default()
    }

    #[inline]
    pub fn get(&self, key: &EntryKey) -> EdgeCounts {
        self.map.get(key).copied().unwrap_or_default()
    }

    #[inline]
    pub fn add(&mut self, key: EntryKey, edge: bool) {
        let counts = self.map.entry(key).or_default();
        if edge {
            counts.ones += 1;
        } else {
            counts.zeros += 1;
        }
        self.total += 1;
    }

    #[inline]
    pub fn remove(&mut self, key: &EntryKey, edge: bool) {
        let Some(counts) = self.map.get_mut(key) else {
            panic!("statistics underflow: removal from absent entry {key:?}");
        };
        let slot = if edge { &mut counts.ones } else { &mut counts.zeros };
        assert!(
            *slot > 0,
            "statistics underflow: entry {key:?} has no {} observation to remove",
            if edge { "edge" } else { "non-edge" }
        );
        *slot -= 1;
        self.total -= 1;
        if counts.total() == 0 {
            self.map.remove(key);
        }
    }

    /// Number of realized entries.
    pub fn n_entries(&self) -> usize {
        self.map.len()
    }

    /// Total assigned observations, equal to the number of compatible pairs.
    pub fn total_observations(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntryKey, &EdgeCounts)> {
        self.map.iter()
    }

    /// Entries in key order (for deterministic output).
    pub fn sorted_entries(&self) -> Vec<(EntryKey, EdgeCounts)> {
        let mut v: Vec<_> = self.map.iter().map(|(k, c)| (k.clone(), *c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Posterior mean of the entry under its Beta prior:
    /// `(ones + lambda1) / (ones + zeros + lambda1 + lambda2)`.
    pub fn point_estimate(&self, key: &EntryKey, lambda1: f64, lambda2: f64) -> f64 {
        let c = self.get(key);
        (c.ones as f64 + lambda1) / (c.total() as f64 + lambda1 + lambda2)
    }

    /// Applies a relabel event to all stored keys.
    pub(crate) fn apply_relabel(&mut self, prefix: &[Label], removed: Label) {
        // Remove every affected key before inserting any shifted key: shifts
        // can chain (label 3 moves onto the slot label 2 vacates), so
        // one-at-a-time migration would merge into a not-yet-moved entry.
        let mut moved: Vec<(EntryKey, EdgeCounts)> = Vec::new();
        self.map.retain(|k, c| {
            match k.shifted_after_removal(prefix, removed) {
                Some(new) => {
                    moved.push((new, *c));
                    false
                }
                None => true,
            }
        });
        for (new, counts) in moved {
            let previous = self.map.insert(new, counts);
            debug_assert!(previous.is_none(), "relabel collision");
        }
    }

    /// Full recount from state. Returns the statistics plus the number of
    /// incompatible pairs and how many of those carry an edge.
    pub fn recount(
        network: &DirectedNetwork,
        paths: &PathAssignment,
        levels: &LevelAssignments,
    ) -> (Self, u64, u64) {
        let mut stats = CompatibilityStats::new();
        let mut incompatible = 0u64;
        let mut incompatible_ones = 0u64;
        for (i, j) in network.ordered_pairs() {
            let res = resolve_sb(
                paths.path(i),
                paths.path(j),
                levels.get(i, j, Direction::Donor),
                levels.get(i, j, Direction::Receiver),
            );
            match res {
                Resolution::Entry(key) => stats.add(key, network.edge(i, j)),
                Resolution::Incompatible => {
                    incompatible += 1;
                    if network.edge(i, j) {
                        incompatible_ones += 1;
                    }
                }
            }
        }
        (stats, incompatible, incompatible_ones)
    }
}
