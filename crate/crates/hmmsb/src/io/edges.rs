//! Tab-separated edge lists.
//!
//! Data lines are `src<TAB>dst` with 0-based actor ids and an optional third
//! column `0|1` (absent means 1). `#` lines carry `key=value` manifest
//! entries; a single optional `src<TAB>dst` header line is tolerated. The actor
//! count comes from the `n_actors` manifest entry when present, otherwise
//! from the largest id seen. Self-loops and repeated pairs are rejected with
//! the offending line number.

use super::{manifest_comments, parse_manifest_line, write_atomic, Manifest};
use crate::error::{HmmsbError, Result};
use crate::network::DirectedNetwork;
use std::fs;
use std::path::Path;

#[derive(Debug)]
pub struct EdgeListFile {
    pub network: DirectedNetwork,
    pub manifest: Manifest,
}

pub fn write_edge_list(path: &Path, network: &DirectedNetwork, manifest: &Manifest) -> Result<()> {
    let mut out = manifest_comments(manifest, "# ");
    out.push_str(&format!("# n_actors={}\n", network.n_actors()));
    out.push_str("src\tdst\n");
    for (i, j) in network.ordered_pairs() {
        if network.edge(i, j) {
            out.push_str(&format!("{i}\t{j}\n"));
        }
    }
    write_atomic(path, &out)
}

pub fn read_edge_list(path: &Path) -> Result<EdgeListFile> {
    let text = fs::read_to_string(path).map_err(|e| HmmsbError::io(path, e))?;
    let mut manifest = Manifest::new();
    let mut parsed: Vec<(usize, usize, bool, usize)> = Vec::new();
    let mut max_id = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(body) = line.strip_prefix('#') {
            parse_manifest_line(body, &mut manifest);
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(HmmsbError::malformed(
                path,
                line_no,
                format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        if fields[0].parse::<usize>().is_err() && parsed.is_empty() {
            // Optional header line such as "src\tdst".
            continue;
        }
        let src = parse_id(path, line_no, fields[0])?;
        let dst = parse_id(path, line_no, fields[1])?;
        if src == dst {
            return Err(HmmsbError::malformed(path, line_no, format!("self-loop on actor {src}")));
        }
        let present = match fields.get(2) {
            None => true,
            Some(&"1") => true,
            Some(&"0") => false,
            Some(other) => {
                return Err(HmmsbError::malformed(
                    path,
                    line_no,
                    format!("third column must be 0 or 1, found {other:?}"),
                ));
            }
        };
        max_id = max_id.max(src).max(dst);
        parsed.push((src, dst, present, line_no));
    }

    let n = match manifest.get("n_actors") {
        Some(v) => v.parse::<usize>().map_err(|_| {
            HmmsbError::MalformedFile {
                path: path.into(),
                message: format!("manifest n_actors is not an integer: {v:?}"),
            }
        })?,
        None if parsed.is_empty() => {
            return Err(HmmsbError::MalformedFile {
                path: path.into(),
                message: "no edges and no n_actors manifest entry".into(),
            });
        }
        None => max_id + 1,
    };
    let mut network = DirectedNetwork::new(n)?;
    let mut seen = vec![false; n * n];
    for (src, dst, present, line_no) in parsed {
        if src >= n || dst >= n {
            return Err(HmmsbError::malformed(
                path,
                line_no,
                format!("actor id out of range: max allowed is {}", n - 1),
            ));
        }
        if std::mem::replace(&mut seen[src * n + dst], true) {
            return Err(HmmsbError::malformed(path, line_no, format!("duplicate pair {src}->{dst}")));
        }
        network.set_edge(src, dst, present);
    }
    Ok(EdgeListFile { network, manifest })
}

/// Reads an `id<TAB>label` node-metadata sidecar, returning labels indexed by
/// actor id. Every id in `[0, n)` must appear exactly once.
pub fn read_node_labels(path: &Path, n: usize) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| HmmsbError::io(path, e))?;
    let mut labels: Vec<Option<String>> = vec![None; n];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, label)) = line.split_once('\t') else {
            return Err(HmmsbError::malformed(path, line_no, "expected id<TAB>label"));
        };
        if id.trim().parse::<usize>().is_err() && idx == 0 {
            continue;
        }
        let id = parse_id(path, line_no, id.trim())?;
        if id >= n {
            return Err(HmmsbError::malformed(path, line_no, format!("actor id {id} out of range")));
        }
        if labels[id].replace(label.trim().to_string()).is_some() {
            return Err(HmmsbError::malformed(path, line_no, format!("duplicate label for actor {id}")));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(id, l)| {
            l.ok_or_else(|| HmmsbError::MalformedFile {
                path: path.into(),
                message: format!("missing label for actor {id}"),
            })
        })
        .collect()
}

fn parse_id(path: &Path, line_no: usize, field: &str) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| HmmsbError::malformed(path, line_no, format!("invalid actor id: {field:?}")))
}
