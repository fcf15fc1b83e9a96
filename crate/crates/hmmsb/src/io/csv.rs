//! CSV exports: chain traces, hyperparameter grids, pair-counting scores,
//! held-out summaries, and the permuted adjacency matrix used for block
//! structure plots. All files start with `# key=value` manifest comments.

use super::{manifest_comments, write_atomic, Manifest};
use crate::error::Result;
use crate::eval::{F1Report, HeldoutReport, IsEstimate};
use crate::network::DirectedNetwork;
use crate::path::PathAssignment;
use std::path::Path;

pub fn write_trace_csv(path: &Path, trace: &[f64], manifest: &Manifest) -> Result<()> {
    let mut out = manifest_comments(manifest, "# ");
    out.push_str("iteration,log_likelihood\n");
    for (i, ll) in trace.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, ll));
    }
    write_atomic(path, &out)
}

pub fn write_gamma_grid_csv(
    path: &Path,
    grid: &[(f64, IsEstimate)],
    selected: f64,
    manifest: &Manifest,
) -> Result<()> {
    let mut out = manifest_comments(manifest, "# ");
    out.push_str(&format!("# selected_gamma={selected}\n"));
    out.push_str("gamma,log_marginal,se_log,n_samples\n");
    for (gamma, est) in grid {
        out.push_str(&format!(
            "{},{},{},{}\n",
            gamma, est.log_marginal, est.se_log, est.n_samples
        ));
    }
    write_atomic(path, &out)
}

pub fn write_f1_csv(path: &Path, report: &F1Report, manifest: &Manifest) -> Result<()> {
    let mut out = manifest_comments(manifest, "# ");
    out.push_str("level,tp,fp,fn,tn,precision,recall,f1\n");
    for l in &report.per_level {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            l.level, l.tp, l.fp, l.fn_, l.tn, l.precision, l.recall, l.f1
        ));
    }
    out.push_str(&format!("total,,,,,,,{}\n", report.total));
    write_atomic(path, &out)
}

pub fn write_heldout_csv(path: &Path, report: &HeldoutReport, manifest: &Manifest) -> Result<()> {
    let mut out = manifest_comments(manifest, "# ");
    out.push_str(
        "split,n_train,n_test,selected_lambda1,selected_lambda2,test_log_marginal,test_se_log\n",
    );
    for (s, split) in report.splits.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s + 1,
            split.train_actors.len(),
            split.test_actors.len(),
            split.selected.0,
            split.selected.1,
            split.test_estimate.log_marginal,
            split.test_estimate.se_log
        ));
    }
    out.push_str(&format!("mean,,,,,{},\n", report.mean_test_log_marginal));
    write_atomic(path, &out)
}

/// Writes the 0/1 adjacency matrix with rows and columns permuted so actors
/// sharing path prefixes are adjacent, plus a sidecar permutation file
/// mapping matrix position to original actor id.
pub fn write_permuted_adjacency(
    matrix_path: &Path,
    permutation_path: &Path,
    network: &DirectedNetwork,
    paths: &PathAssignment,
    manifest: &Manifest,
) -> Result<()> {
    assert_eq!(network.n_actors(), paths.n_actors());
    let mut order: Vec<usize> = (0..network.n_actors()).collect();
    order.sort_by(|&a, &b| paths.path(a).cmp(paths.path(b)).then(a.cmp(&b)));

    let mut matrix = manifest_comments(manifest, "# ");
    for &i in &order {
        let row: Vec<&str> = order
            .iter()
            .map(|&j| if i != j && network.edge(i, j) { "1" } else { "0" })
            .collect();
        matrix.push_str(&row.join(","));
        matrix.push('\n');
    }
    write_atomic(matrix_path, &matrix)?;

    let mut perm = manifest_comments(manifest, "# ");
    perm.push_str("position,actor_id\n");
    for (pos, &a) in order.iter().enumerate() {
        perm.push_str(&format!("{pos},{a}\n"));
    }
    write_atomic(permutation_path, &perm)
}
