//! Importance-sampled marginal likelihood of a network.

use crate::gem::LevelBlockPrior;
use crate::gibbs::{complete_log_likelihood_parts, sample_latents_from_prior};
use crate::hyper::Hyperparams;
use crate::network::DirectedNetwork;
use crate::special::log_sum_exp;
use rand::Rng;

/// A log marginal-likelihood estimate with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsEstimate {
    pub log_marginal: f64,
    /// Standard error of `log_marginal`: `sd(w) / (mean(w) * sqrt(n))` over
    /// the importance weights; infinite for a single sample.
    pub se_log: f64,
    pub n_samples: usize,
}

/// Estimates `log P(E)` by likelihood weighting: latents `(c, z)` are drawn
/// from their prior (nested CRP paths, depth-conditioned stick-breaking
/// indicator blocks) and weighted by the collapsed edge likelihood, the
/// product over realized entries of Beta-Bernoulli marginals. Draws whose
/// latents put an observed edge on an incompatible pair carry weight zero.
pub fn marginal_likelihood_is<R: Rng + ?Sized>(
    network: &DirectedNetwork,
    hyper: &Hyperparams,
    n_is_samples: usize,
    rng: &mut R,
) -> IsEstimate {
    assert!(n_is_samples >= 1);
    let n = network.n_actors();
    let block_prior = (n > 1).then(|| {
        LevelBlockPrior::new(hyper.gem_a(), hyper.gem_b(), hyper.max_depth, 2 * (n - 1))
    });
    let mut log_weights = Vec::with_capacity(n_is_samples);
    for _ in 0..n_is_samples {
        let (paths, levels) = sample_latents_from_prior(n, hyper, block_prior.as_ref(), rng);
        log_weights.push(complete_log_likelihood_parts(network, &paths, &levels, hyper).edges);
    }
    estimate_from_log_weights(&log_weights)
}

/// Log-mean-exp of the weights plus a delta-method standard error.
pub fn estimate_from_log_weights(log_weights: &[f64]) -> IsEstimate {
    let n = log_weights.len();
    let log_sum = log_sum_exp(log_weights);
    let log_marginal = log_sum - (n as f64).ln();
    if n == 1 {
        return IsEstimate {
            log_marginal,
            se_log: f64::INFINITY,
            n_samples: 1,
        };
    }
    // Relative standard error of the weight mean equals the absolute
    // standard error of its log, to first order.
    let shift = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return IsEstimate {
            log_marginal: f64::NEG_INFINITY,
            se_log: f64::INFINITY,
            n_samples: n,
        };
    }
    let scaled: Vec<f64> = log_weights.iter().map(|lw| (lw - shift).exp()).collect();
    let mean = scaled.iter().sum::<f64>() / n as f64;
    let var = scaled.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    IsEstimate {
        log_marginal,
        se_log: (var / n as f64).sqrt() / mean,
        n_samples: n,
    }
}
