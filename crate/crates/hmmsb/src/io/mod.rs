//! File formats: edge lists, retained-sample files, hierarchy JSON, DOT and
//! CSV exports, and flat key=value configuration.
//!
//! Every writer routes through an atomic temp-file-then-rename so failed
//! runs never leave partial artifacts, and every format embeds the
//! invocation manifest (as `#` comments in tabular formats, a `manifest`
//! field in JSON, `//` comments in DOT).

mod config;
mod csv;
mod dot;
mod edges;
mod hierarchy;
mod samples;

pub use config::{parse_config_file, parse_config_str};
pub use csv::{
    write_f1_csv, write_gamma_grid_csv, write_heldout_csv, write_permuted_adjacency,
    write_trace_csv,
};
pub use dot::{hierarchy_dot, network_dot};
pub use edges::{read_edge_list, read_node_labels, write_edge_list, EdgeListFile};
pub use hierarchy::{
    hierarchy_from_paths, hierarchy_to_paths, read_hierarchy, write_hierarchy, BSummary,
    HierarchyFile, HierarchyNode,
};
pub use samples::{read_samples, write_samples, SamplesHeader};

use crate::error::{HmmsbError, Result};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

/// Invocation metadata embedded in every output file.
pub type Manifest = BTreeMap<String, String>;

/// Builds a manifest from the command name, seed, and extra key=value pairs.
pub fn manifest(command: &str, seed: u64, extra: &[(&str, String)]) -> Manifest {
    let mut m = Manifest::new();
    m.insert("command".into(), command.into());
    m.insert("seed".into(), seed.to_string());
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    for (k, v) in extra {
        m.insert((*k).into(), v.clone());
    }
    m
}

/// Writes `content` to `path` atomically: a sibling temp file is written,
/// flushed, and renamed over the target, so readers never observe a partial
/// file and errors leave nothing behind.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| HmmsbError::io(dir, e))?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| HmmsbError::Config(format!("not a file path: {}", path.display())))?;
    let mut tmp = path.to_path_buf();
    tmp.set_file_name(format!(".{}.partial", file_name.to_string_lossy()));
    let write = || -> std::io::Result<()> {
        fs::write(&tmp, content)?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        HmmsbError::io(path, e)
    })
}

/// Serializes a manifest as `# key=value` comment lines.
pub(crate) fn manifest_comments(manifest: &Manifest, prefix: &str) -> String {
    let mut out = String::new();
    for (k, v) in manifest {
        out.push_str(prefix);
        out.push_str(k);
        out.push('=');
        out.push_str(v);
        out.push('\n');
    }
    out
}

/// Parses `key=value` from a comment line body.
pub(crate) fn parse_manifest_line(body: &str, into: &mut Manifest) {
    if let Some((k, v)) = body.split_once('=') {
        into.insert(k.trim().to_string(), v.trim().to_string());
    }
}
