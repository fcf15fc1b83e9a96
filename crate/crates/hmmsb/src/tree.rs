//! Occupancy tree over hierarchy paths.
//!
//! A [`HierarchyTree`] is the derived view of a [`PathAssignment`]: one node
//! per realized label prefix, carrying the number of actors whose path passes
//! through it. The sampler maintains it incrementally while actors detach and
//! reattach; equality with the tree re-derived from scratch is a checked
//! invariant.
//!
//! Child labels are implicit: a node stores its children in first-visit
//! order, and the child at position `p` has label `p + 1`. Removing a child
//! from the middle therefore shifts the labels of its later siblings; such an
//! event is reported to the caller as a [`RelabelEvent`] so that stored label
//! vectors elsewhere (paths, statistics keys) can be rewritten.

use crate::path::{Label, PathAssignment};

#[derive(Debug, Clone)]
struct Node {
    occupancy: u32,
    /// Slot indices of children; position `p` holds the child labeled `p+1`.
    children: Vec<usize>,
}

#[derive(Debug, Clone)]
enum Slot {
    Occupied(Node),
    Free(Option<usize>),
}

/// A branch died while later siblings existed: under `parent_prefix`, labels
/// greater than `removed_label` shifted down by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelabelEvent {
    pub parent_prefix: Vec<Label>,
    pub removed_label: Label,
}

#[derive(Debug, Clone)]
pub struct HierarchyTree {
    depth: usize,
    slots: Vec<Slot>,
    free_head: Option<usize>,
    root: usize,
}

impl HierarchyTree {
    /// Empty tree of the given depth (root only, occupancy zero).
    pub fn new(depth: usize) -> Self {
        assert!(depth >= 1, "hierarchy depth must be at least 1");
        HierarchyTree {
            depth,
            slots: vec![Slot::Occupied(Node {
                occupancy: 0,
                children: Vec::new(),
            })],
            free_head: None,
            root: 0,
        }
    }

    /// Derives the tree for a canonical assignment.
    ///
    /// Panics when a label skips ahead of the first-visit order; canonicalize
    /// the assignment first.
    pub fn from_paths(paths: &PathAssignment) -> Self {
        let mut tree = HierarchyTree::new(paths.depth());
        for actor in 0..paths.n_actors() {
            tree.add_path(paths.path(actor));
        }
        tree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn node(&self, idx: usize) -> &Node {
        match &self.slots[idx] {
            Slot::Occupied(n) => n,
            Slot::Free(_) => unreachable!("dangling tree slot {idx}"),
        }
    }

    fn node_mut(&mut self, idx: usize) -> &mut Node {
        match &mut self.slots[idx] {
            Slot::Occupied(n) => n,
            Slot::Free(_) => unreachable!("dangling tree slot {idx}"),
        }
    }

    fn alloc(&mut self) -> usize {
        let node = Node {
            occupancy: 0,
            children: Vec::new(),
        };
        match self.free_head {
            Some(idx) => {
                self.free_head = match self.slots[idx] {
                    Slot::Free(next) => next,
                    Slot::Occupied(_) => unreachable!("free list points at a live node"),
                };
                self.slots[idx] = Slot::Occupied(node);
                idx
            }
            None => {
                self.slots.push(Slot::Occupied(node));
                self.slots.len() - 1
            }
        }
    }

    fn release(&mut self, idx: usize) {
        self.slots[idx] = Slot::Free(self.free_head);
        self.free_head = Some(idx);
    }

    fn walk(&self, prefix: &[Label]) -> Option<usize> {
        let mut idx = self.root;
        for &label in prefix {
            let node = self.node(idx);
            let pos = label as usize - 1;
            if pos >= node.children.len() {
                return None;
            }
            idx = node.children[pos];
        }
        Some(idx)
    }

    /// Number of actors whose path passes through `prefix`, if realized.
    pub fn occupancy(&self, prefix: &[Label]) -> Option<u32> {
        self.walk(prefix).map(|idx| self.node(idx).occupancy)
    }

    /// Total actors in the tree.
    pub fn n_actors(&self) -> u32 {
        self.node(self.root).occupancy
    }

    /// Occupancy of each child of `prefix`, by label order. Empty when the
    /// prefix is unrealized or a leaf.
    pub fn child_occupancies(&self, prefix: &[Label]) -> Vec<u32> {
        match self.walk(prefix) {
            Some(idx) => self
                .node(idx)
                .children
                .iter()
                .map(|&c| self.node(c).occupancy)
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn n_children(&self, prefix: &[Label]) -> usize {
        self.walk(prefix)
            .map_or(0, |idx| self.node(idx).children.len())
    }

    /// Adds one actor along `path` (length = depth, canonical extension:
    /// each label at most one past the last existing child).
    pub fn add_path(&mut self, path: &[Label]) {
        assert_eq!(path.len(), self.depth, "path length must equal tree depth");
        let mut idx = self.root;
        self.node_mut(idx).occupancy += 1;
        for &label in path {
            let n_children = self.node(idx).children.len();
            let pos = label as usize - 1;
            let child = if pos < n_children {
                self.node(idx).children[pos]
            } else if pos == n_children {
                let fresh = self.alloc();
                self.node_mut(idx).children.push(fresh);
                fresh
            } else {
                panic!(
                    "non-canonical label {label} with only {n_children} existing children; \
                     canonicalize the assignment first"
                );
            };
            self.node_mut(child).occupancy += 1;
            idx = child;
        }
    }

    /// Removes one actor along `path`. Dead branches are pruned; when the
    /// pruned branch had later siblings, the single resulting label shift is
    /// returned so the caller can rewrite stored label vectors.
    pub fn remove_path(&mut self, path: &[Label]) -> Option<RelabelEvent> {
        assert_eq!(path.len(), self.depth, "path length must equal tree depth");
        // Walk down recording the chain of slot indices.
        let mut chain = Vec::with_capacity(self.depth + 1);
        chain.push(self.root);
        let mut idx = self.root;
        for &label in path {
            let node = self.node(idx);
            let pos = label as usize - 1;
            assert!(pos < node.children.len(), "removal of an unrealized path");
            idx = node.children[pos];
            chain.push(idx);
        }
        for &i in &chain {
            let node = self.node_mut(i);
            assert!(node.occupancy > 0, "occupancy underflow while removing a path");
            node.occupancy -= 1;
        }
        // The highest now-empty node determines the (single) pruning point:
        // everything below it belonged only to the removed actor.
        let first_dead_depth = (1..chain.len()).find(|&d| self.node(chain[d]).occupancy == 0);
        let d = first_dead_depth?;
        for &dead in &chain[d..] {
            self.release(dead);
        }
        let parent = chain[d - 1];
        let removed_label = path[d - 1];
        let pos = removed_label as usize - 1;
        self.node_mut(parent).children.remove(pos);
        let had_later_siblings = pos < self.node(parent).children.len();
        had_later_siblings.then(|| RelabelEvent {
            parent_prefix: path[..d - 1].to_vec(),
            removed_label,
        })
    }

    /// Depth-first enumeration of all realized prefixes with occupancies,
    /// children visited in label order. The root is `(vec![], N)`.
    pub fn shape(&self) -> Vec<(Vec<Label>, u32)> {
        let mut out = Vec::new();
        let mut stack = vec![(self.root, Vec::new())];
        while let Some((idx, prefix)) = stack.pop() {
            let node = self.node(idx);
            out.push((prefix.clone(), node.occupancy));
            for (pos, &child) in node.children.iter().enumerate().rev() {
                let mut p = prefix.clone();
                p.push(pos as Label + 1);
                stack.push((child, p));
            }
        }
        out
    }

    /// All fully realized depth-`K` paths, in label order.
    pub fn realized_paths(&self) -> Vec<Vec<Label>> {
        self.shape()
            .into_iter()
            .filter(|(p, _)| p.len() == self.depth)
            .map(|(p, _)| p)
            .collect()
    }

    /// Occupancies of level-`k` nodes (1-based level), in DFS order.
    pub fn level_sizes(&self, k: usize) -> Vec<u32> {
        self.shape()
            .into_iter()
            .filter(|(p, _)| p.len() == k)
            .map(|(_, occ)| occ)
            .collect()
    }

    /// Structural equality (same realized prefixes and occupancies).
    pub fn same_shape(&self, other: &HierarchyTree) -> bool {
        self.depth == other.depth && self.shape() == other.shape()
    }
}
