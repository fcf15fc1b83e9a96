//! Recursive hierarchy JSON.
//!
//! A file holds one root node; every node carries its path prefix, subtree
//! size, the sorted actor ids beneath it, and its children. Internal nodes
//! may carry posterior block summaries for the entries between their child
//! communities (raw one/zero counts plus the smoothed point estimate).
//! Loading validates the partition structure and reconstructs a
//! [`PathAssignment`] exactly.

use super::{write_atomic, Manifest};
use crate::error::{HmmsbError, Result};
use crate::path::{Label, PathAssignment};
use crate::stats::{CompatibilityStats, EntryKey};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

/// Posterior summary of one blockmodel entry between two child communities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BSummary {
    pub donor_child: Label,
    pub receiver_child: Label,
    pub ones: u32,
    pub zeros: u32,
    pub point_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyNode {
    pub path_prefix: Vec<Label>,
    pub size: u32,
    pub actor_ids: Vec<usize>,
    pub children: Vec<HierarchyNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_summaries: Vec<BSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyFile {
    pub format: String,
    pub n_actors: usize,
    pub depth: usize,
    pub manifest: Manifest,
    pub root: HierarchyNode,
}

/// Builds the recursive node structure from a path assignment. When `stats`
/// is given, internal nodes carry block summaries for the entries between
/// their children (including diagonal self-entries) that have observations.
pub fn hierarchy_from_paths(
    paths: &PathAssignment,
    stats: Option<(&CompatibilityStats, f64, f64)>,
) -> HierarchyNode {
    let actors: Vec<usize> = (0..paths.n_actors()).collect();
    build_node(paths, Vec::new(), actors, stats)
}

fn build_node(
    paths: &PathAssignment,
    prefix: Vec<Label>,
    mut actors: Vec<usize>,
    stats: Option<(&CompatibilityStats, f64, f64)>,
) -> HierarchyNode {
    actors.sort_unstable();
    let depth = prefix.len();
    let mut children = Vec::new();
    if depth < paths.depth() {
        let mut by_label: Vec<(Label, Vec<usize>)> = Vec::new();
        for &a in &actors {
            let label = paths.path(a)[depth];
            match by_label.iter_mut().find(|(l, _)| *l == label) {
                Some((_, group)) => group.push(a),
                None => by_label.push((label, vec![a])),
            }
        }
        by_label.sort_unstable_by_key(|(l, _)| *l);
        for (label, group) in by_label {
            let mut child_prefix = prefix.clone();
            child_prefix.push(label);
            children.push(build_node(paths, child_prefix, group, stats));
        }
    }
    let b_summaries = match stats {
        Some((stats, l1, l2)) if !children.is_empty() => {
            let labels: Vec<Label> = children.iter().map(|c| *c.path_prefix.last().unwrap()).collect();
            let mut out = Vec::new();
            for &d in &labels {
                for &r in &labels {
                    let key = EntryKey::new(&prefix, d, r);
                    let counts = stats.get(&key);
                    if counts.total() > 0 {
                        out.push(BSummary {
                            donor_child: d,
                            receiver_child: r,
                            ones: counts.ones,
                            zeros: counts.zeros,
                            point_estimate: stats.point_estimate(&key, l1, l2),
                        });
                    }
                }
            }
            out
        }
        _ => Vec::new(),
    };
    HierarchyNode {
        path_prefix: prefix,
        size: actors.len() as u32,
        actor_ids: actors,
        children,
        b_summaries,
    }
}

/// Reconstructs the per-actor paths encoded by a hierarchy tree.
pub fn hierarchy_to_paths(file: &HierarchyFile) -> Result<PathAssignment> {
    let bad = |message: String| HmmsbError::Config(message);
    let mut paths: Vec<Option<Vec<Label>>> = vec![None; file.n_actors];
    let mut stack: Vec<&HierarchyNode> = vec![&file.root];
    while let Some(node) = stack.pop() {
        if node.size as usize != node.actor_ids.len() {
            return Err(bad(format!(
                "node {:?}: size {} does not match {} actor ids",
                node.path_prefix,
                node.size,
                node.actor_ids.len()
            )));
        }
        if node.children.is_empty() {
            if node.path_prefix.len() != file.depth {
                return Err(bad(format!(
                    "leaf {:?} is at depth {} but the hierarchy depth is {}",
                    node.path_prefix,
                    node.path_prefix.len(),
                    file.depth
                )));
            }
            for &a in &node.actor_ids {
                if a >= file.n_actors {
                    return Err(bad(format!("actor id {a} out of range")));
                }
                if paths[a].replace(node.path_prefix.clone()).is_some() {
                    return Err(bad(format!("actor {a} appears under two leaves")));
                }
            }
        } else {
            let child_total: u32 = node.children.iter().map(|c| c.size).sum();
            if child_total != node.size {
                return Err(bad(format!(
                    "node {:?}: children sizes sum to {child_total}, node size is {}",
                    node.path_prefix, node.size
                )));
            }
            for child in &node.children {
                if child.path_prefix.len() != node.path_prefix.len() + 1
                    || !child.path_prefix.starts_with(&node.path_prefix)
                {
                    return Err(bad(format!(
                        "child {:?} does not extend parent {:?}",
                        child.path_prefix, node.path_prefix
                    )));
                }
                stack.push(child);
            }
        }
    }
    let paths: Option<Vec<Vec<Label>>> = paths.into_iter().collect();
    let paths = paths.ok_or_else(|| bad("some actors are missing from the hierarchy".into()))?;
    PathAssignment::from_paths(paths, file.depth)
}

pub fn write_hierarchy(path: &Path, file: &HierarchyFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file).expect("hierarchy serializes");
    text.push('\n');
    write_atomic(path, &text)
}

pub fn read_hierarchy(path: &Path) -> Result<HierarchyFile> {
    let text = fs::read_to_string(path).map_err(|e| HmmsbError::io(path, e))?;
    let file: HierarchyFile = serde_json::from_str(&text).map_err(|e| HmmsbError::MalformedFile {
        path: path.into(),
        message: format!("invalid hierarchy JSON: {e}"),
    })?;
    if file.format != "hmmsb-hierarchy-v1" {
        return Err(HmmsbError::MalformedFile {
            path: path.into(),
            message: format!("unsupported format {:?}", file.format),
        });
    }
    // Surface structural problems at load time with the file name attached.
    hierarchy_to_paths(&file).map_err(|e| HmmsbError::MalformedFile {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok(file)
}

impl HierarchyFile {
    pub fn new(paths: &PathAssignment, root: HierarchyNode, manifest: Manifest) -> Self {
        HierarchyFile {
            format: "hmmsb-hierarchy-v1".into(),
            n_actors: paths.n_actors(),
            depth: paths.depth(),
            manifest,
            root,
        }
    }
}
