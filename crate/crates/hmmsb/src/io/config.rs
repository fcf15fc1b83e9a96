//! Flat `key=value` configuration files.
//!
//! Keys mirror the CLI flag names; blank lines and `#` comments are ignored.
//! The CLI merges these under its own flags, with explicit flags winning.

use crate::error::{HmmsbError, Result};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

pub fn parse_config_str(path: &Path, text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HmmsbError::malformed(path, idx + 1, "expected key=value"));
        };
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(HmmsbError::malformed(path, idx + 1, "empty key"));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(HmmsbError::malformed(path, idx + 1, format!("duplicate key {key:?}")));
        }
    }
    Ok(out)
}

pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| HmmsbError::io(path, e))?;
    parse_config_str(path, &text)
}
