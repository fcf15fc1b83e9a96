//! Graphviz exports: the community hierarchy as a tree, and the network
//! itself with nodes colored by top-level community and edges styled by the
//! coarse interaction level (level 1 solid, level 2 dashed, deeper dotted).

use super::{manifest_comments, Manifest};
use crate::levels::LevelAssignments;
use crate::network::DirectedNetwork;
use crate::path::{Label, PathAssignment};

const PALETTE: [&str; 10] = [
    "steelblue",
    "firebrick",
    "forestgreen",
    "darkorange",
    "mediumpurple",
    "goldenrod",
    "turquoise4",
    "hotpink3",
    "olivedrab",
    "gray40",
];

fn branch_color(label: Label) -> &'static str {
    PALETTE[(label as usize - 1) % PALETTE.len()]
}

fn prefix_id(prefix: &[Label]) -> String {
    if prefix.is_empty() {
        "root".into()
    } else {
        let joined: Vec<String> = prefix.iter().map(u16::to_string).collect();
        format!("n_{}", joined.join("_"))
    }
}

fn prefix_label(prefix: &[Label]) -> String {
    if prefix.is_empty() {
        "root".into()
    } else {
        let joined: Vec<String> = prefix.iter().map(u16::to_string).collect();
        format!("({})", joined.join(","))
    }
}

/// Renders the hierarchy tree. Node area scales with community size.
pub fn hierarchy_dot(root: &super::HierarchyNode, manifest: &Manifest) -> String {
    let mut out = manifest_comments(manifest, "// ");
    out.push_str("digraph hierarchy {\n  rankdir=TB;\n  node [shape=box, style=filled];\n");
    let total = root.size.max(1) as f64;
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        let share = node.size as f64 / total;
        let width = 0.6 + 1.8 * share.sqrt();
        let color = node
            .path_prefix
            .first()
            .map(|&l| branch_color(l))
            .unwrap_or("white");
        out.push_str(&format!(
            "  {} [label=\"{}\\nn={}\", width={:.2}, fillcolor={}];\n",
            prefix_id(&node.path_prefix),
            prefix_label(&node.path_prefix),
            node.size,
            width,
            color,
        ));
        for child in &node.children {
            out.push_str(&format!(
                "  {} -> {};\n",
                prefix_id(&node.path_prefix),
                prefix_id(&child.path_prefix)
            ));
        }
        stack.extend(node.children.iter());
    }
    out.push_str("}\n");
    out
}

/// Renders the directed network. Nodes take their top-level community color;
/// each edge is drawn as a tail-to-head color gradient, solid when its coarse
/// level is 1, dashed at 2, dotted deeper. Without level assignments every
/// edge is solid.
pub fn network_dot(
    network: &DirectedNetwork,
    paths: &PathAssignment,
    levels: Option<&LevelAssignments>,
    manifest: &Manifest,
) -> String {
    assert_eq!(network.n_actors(), paths.n_actors());
    let mut out = manifest_comments(manifest, "// ");
    out.push_str("digraph network {\n  node [shape=circle, style=filled];\n");
    for a in 0..network.n_actors() {
        let name = network
            .labels()
            .map(|l| l[a].clone())
            .unwrap_or_else(|| a.to_string());
        out.push_str(&format!(
            "  a{} [label=\"{}\", fillcolor={}];\n",
            a,
            name,
            branch_color(paths.path(a)[0])
        ));
    }
    for (i, j) in network.ordered_pairs() {
        if !network.edge(i, j) {
            continue;
        }
        let style = match levels.map(|z| z.donor(i, j).min(z.receiver(i, j))) {
            None | Some(1) => "solid",
            Some(2) => "dashed",
            Some(_) => "dotted",
        };
        out.push_str(&format!(
            "  a{} -> a{} [style={}, color=\"{}:{}\"];\n",
            i,
            j,
            style,
            branch_color(paths.path(i)[0]),
            branch_color(paths.path(j)[0]),
        ));
    }
    out.push_str("}\n");
    out
}
