//! Held-out evaluation: train/test actor splits with grid-selected
//! Beta hyperparameters.

use super::marginal::{marginal_likelihood_is, IsEstimate};
use crate::error::{HmmsbError, Result};
use crate::hyper::Hyperparams;
use crate::network::DirectedNetwork;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Protocol settings. The grid is over the Beta prior `(lambda1, lambda2)`;
/// all other hyperparameters come from `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeldoutConfig {
    pub n_splits: usize,
    pub lambda_grid: Vec<(f64, f64)>,
    pub n_is_samples: usize,
    pub base: Hyperparams,
}

impl HeldoutConfig {
    /// The default `(lambda1, lambda2)` grid: `{.1, .3, .5, .7, .9}` square.
    pub fn default_lambda_grid() -> Vec<(f64, f64)> {
        let values = [0.1, 0.3, 0.5, 0.7, 0.9];
        let mut out = Vec::with_capacity(25);
        for &l1 in &values {
            for &l2 in &values {
                out.push((l1, l2));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_splits == 0 || self.lambda_grid.is_empty() || self.n_is_samples == 0 {
            return Err(HmmsbError::Config(
                "held-out protocol needs at least one split, one grid cell, and one sample".into(),
            ));
        }
        self.base.validate()
    }
}

/// One split's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub train_actors: Vec<usize>,
    pub test_actors: Vec<usize>,
    /// Train-set log marginal likelihood per grid cell, in grid order.
    pub train_estimates: Vec<((f64, f64), IsEstimate)>,
    pub selected: (f64, f64),
    pub test_estimate: IsEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeldoutReport {
    pub splits: Vec<SplitResult>,
    pub mean_test_log_marginal: f64,
}

/// Picks the grid cell with the highest estimate; ties go to the smaller
/// `lambda1`, then the smaller `lambda2`, independent of grid order.
pub fn select_lambda(table: &[((f64, f64), IsEstimate)]) -> (f64, f64) {
    let mut best = table[0];
    for &entry in &table[1..] {
        let ((l1, l2), est) = entry;
        let ((b1, b2), best_est) = best;
        if est.log_marginal > best_est.log_marginal
            || (est.log_marginal == best_est.log_marginal && (l1, l2) < (b1, b2))
        {
            best = entry;
        }
    }
    best.0
}

/// Runs the protocol: per split, actors are shuffled and halved (the train
/// side takes the extra actor when `n` is odd); `(lambda1, lambda2)` is
/// selected by train marginal likelihood and evaluated on the test subgraph.
/// Test edges never influence selection: only the induced train subgraph is
/// visible to the grid search.
pub fn heldout_protocol<R: Rng + ?Sized>(
    network: &DirectedNetwork,
    config: &HeldoutConfig,
    rng: &mut R,
) -> Result<HeldoutReport> {
    config.validate()?;
    let n = network.n_actors();
    if n < 2 {
        return Err(HmmsbError::Config(
            "held-out evaluation needs at least two actors".into(),
        ));
    }
    let mut splits = Vec::with_capacity(config.n_splits);
    for _ in 0..config.n_splits {
        let mut actors: Vec<usize> = (0..n).collect();
        actors.shuffle(rng);
        let mid = n.div_ceil(2);
        let mut train_actors = actors[..mid].to_vec();
        let mut test_actors = actors[mid..].to_vec();
        train_actors.sort_unstable();
        test_actors.sort_unstable();
        let train_net = network.induced_subgraph(&train_actors)?;
        let test_net = network.induced_subgraph(&test_actors)?;

        let mut train_estimates = Vec::with_capacity(config.lambda_grid.len());
        for &(l1, l2) in &config.lambda_grid {
            let hyper = Hyperparams {
                lambda1: l1,
                lambda2: l2,
                ..config.base.clone()
            };
            let est = marginal_likelihood_is(&train_net, &hyper, config.n_is_samples, rng);
            train_estimates.push(((l1, l2), est));
        }
        let selected = select_lambda(&train_estimates);
        let hyper = Hyperparams {
            lambda1: selected.0,
            lambda2: selected.1,
            ..config.base.clone()
        };
        let test_estimate = marginal_likelihood_is(&test_net, &hyper, config.n_is_samples, rng);
        splits.push(SplitResult {
            train_actors,
            test_actors,
            train_estimates,
            selected,
            test_estimate,
        });
    }
    let mean_test_log_marginal = splits
        .iter()
        .map(|s| s.test_estimate.log_marginal)
        .sum::<f64>()
        / splits.len() as f64;
    Ok(HeldoutReport {
        splits,
        mean_test_log_marginal,
    })
}

/// Grid search over the nested CRP concentration by full-network marginal
/// likelihood; ties go to the smaller `gamma`, independent of grid order.
pub fn select_gamma<R: Rng + ?Sized>(
    network: &DirectedNetwork,
    base: &Hyperparams,
    gamma_grid: &[f64],
    n_is_samples: usize,
    rng: &mut R,
) -> (f64, Vec<(f64, IsEstimate)>) {
    assert!(!gamma_grid.is_empty());
    let mut table = Vec::with_capacity(gamma_grid.len());
    for &gamma in gamma_grid {
        let hyper = Hyperparams {
            gamma,
            ..base.clone()
        };
        let est = marginal_likelihood_is(network, &hyper, n_is_samples, rng);
        table.push((gamma, est));
    }
    let mut best = table[0];
    for &entry in &table[1..] {
        let (gamma, est) = entry;
        let (best_gamma, best_est) = best;
        if est.log_marginal > best_est.log_marginal
            || (est.log_marginal == best_est.log_marginal && gamma < best_gamma)
        {
            best = entry;
        }
    }
    (best.0, table)
}

/// The concentration grid used by the simulation study.
pub const GAMMA_GRID: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 1.5, 2.0];
