//! Two-parameter stick-breaking (GEM) prior over interaction levels.
//!
//! Stick fractions are independent draws `V_k ~ Beta(m*pi, (1-m)*pi)` and the
//! level weights are `theta_k = V_k * prod_{u<k} (1 - V_u)`. The hierarchy
//! truncates the stick at depth `K`.
//!
//! Two truncation views are needed and they are not the same object:
//!
//! * **Forward simulation** renormalizes `theta` over `1..=K` per actor and
//!   draws indicators from the renormalized vector ([`sample_gem`]).
//! * **Collapsed inference** treats an actor's indicator block as draws from
//!   the *infinite* stick conditioned on every indicator landing within
//!   `1..=K`. Its single-site conditionals are exactly the untruncated
//!   posterior-predictive weights renormalized over `1..=K`
//!   ([`predictive_weights`]), which is what the Gibbs sampler uses, and its
//!   block law is available exactly through [`LevelBlockPrior`]. Chain
//!   initialization, joint-distribution tests, and the importance-sampling
//!   proposal all draw from this law so that they match the sampler's
//!   stationary prior exactly.

use crate::error::{HmmsbError, Result};
use crate::path::Level;
use crate::special::{ln_beta, log_sum_exp};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Beta, Distribution};

/// Per-actor mixed membership over levels `1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVector {
    /// Stick fractions, present when the vector came from the GEM prior.
    sticks: Option<Vec<f64>>,
    /// Level weights, renormalized to sum to one over `1..=K`.
    theta: Vec<f64>,
}

impl MembershipVector {
    /// Fixed weights (e.g. the simulation studies' shared vector); values
    /// must be nonnegative with a positive sum and are renormalized.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(HmmsbError::Config("membership vector is empty".into()));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(HmmsbError::Config(
                "membership weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(HmmsbError::Config(
                "membership weights must have a positive sum".into(),
            ));
        }
        Ok(MembershipVector {
            sticks: None,
            theta: weights.iter().map(|w| w / sum).collect(),
        })
    }

    pub fn depth(&self) -> usize {
        self.theta.len()
    }

    /// Renormalized level weights; they sum to one within 1e-12.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Stick fractions prior to truncation, when available.
    pub fn sticks(&self) -> Option<&[f64]> {
        self.sticks.as_deref()
    }

    /// Draws a level in `1..=K` from the membership weights.
    pub fn sample_level<R: Rng + ?Sized>(&self, rng: &mut R) -> Level {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, &w) in self.theta.iter().enumerate() {
            acc += w;
            if u < acc {
                return (k + 1) as Level;
            }
        }
        self.theta.len() as Level
    }
}

/// Draws one membership vector from the truncated GEM prior.
///
/// Sticks `V_1..V_K` are independent `Beta(a, b)` draws with `a = m*pi`,
/// `b = (1-m)*pi`; the raw weights are renormalized over the `K` levels.
pub fn sample_gem<R: Rng + ?Sized>(a: f64, b: f64, depth: usize, rng: &mut R) -> MembershipVector {
    let beta = Beta::new(a, b).expect("validated Beta shapes");
    loop {
        let sticks: Vec<f64> = (0..depth).map(|_| beta.sample(rng)).collect();
        let mut remaining = 1.0;
        let mut theta = Vec::with_capacity(depth);
        for &v in &sticks {
            theta.push(v * remaining);
            remaining *= 1.0 - v;
        }
        let sum: f64 = theta.iter().sum();
        // All sticks underflowing to zero has vanishing probability but would
        // make the renormalization divide by zero.
        if sum > 0.0 {
            for t in &mut theta {
                *t /= sum;
            }
            return MembershipVector {
                sticks: Some(sticks),
                theta,
            };
        }
    }
}

/// Unnormalized posterior-predictive weights for a single level indicator
/// given the actor's other indicators.
///
/// `counts[k-1]` is the number of other indicators at level `k`. The weight
/// for level `k` is the iterated expectation
/// `E[V_k | counts] * prod_{u<k} E[1 - V_u | counts]`:
///
/// ```text
/// (a + n_k) / (a + b + n_{>=k}) * prod_{u<k} (b + n_{>u}) / (a + b + n_{>=u})
/// ```
///
/// The caller renormalizes over `1..=K`; that renormalization makes the
/// result the exact Gibbs conditional of the depth-conditioned block law.
pub fn predictive_weights(a: f64, b: f64, counts: &[u32]) -> Vec<f64> {
    let depth = counts.len();
    let mut weights = Vec::with_capacity(depth);
    // n_geq[k] = number of indicators at level >= k+1 (0-based index).
    let mut n_geq = counts.to_vec();
    for k in (0..depth.saturating_sub(1)).rev() {
        n_geq[k] += n_geq[k + 1];
    }
    let mut carried = 1.0;
    for k in 0..depth {
        let geq = n_geq[k] as f64;
        let eq = counts[k] as f64;
        weights.push(carried * (a + eq) / (a + b + geq));
        carried *= (b + (geq - eq)) / (a + b + geq);
    }
    weights
}

/// Collapsed log-weight of one specific indicator sequence with per-level
/// `counts`, under the infinite stick with the Betas integrated out:
/// `prod_k B(a + n_k, b + n_{>k}) / B(a, b)`.
pub fn log_block_weight(a: f64, b: f64, counts: &[u32]) -> f64 {
    let ln_b0 = ln_beta(a, b);
    let mut n_gt: u64 = 0;
    let mut total = 0.0;
    for k in (0..counts.len()).rev() {
        total += ln_beta(a + counts[k] as f64, b + n_gt as f64) - ln_b0;
        n_gt += counts[k] as u64;
    }
    total
}

/// Exact sampler and density for one actor's indicator block of size `M`
/// under the depth-conditioned GEM law.
///
/// Built once per `(a, b, depth, M)`; sampling a block costs `K` categorical
/// draws plus a shuffle. Internally: `n_1 ~ BetaBinomial(M; a, b)` tilted by
/// the probability that the remaining indicators fit within the remaining
/// depth, recursively per level.
#[derive(Debug, Clone)]
pub struct LevelBlockPrior {
    depth: usize,
    block_size: usize,
    /// `log_t[k][m]` = log probability that `m` indicators at levels `> k`
    /// all land within depth; `k` ranges `0..=depth` (0 = all levels).
    log_t: Vec<Vec<f64>>,
    /// `cdf[k][m]` = cumulative distribution of `n_{k+1}` given `m` indicators
    /// remain at levels `>= k+1`.
    cdf: Vec<Vec<Vec<f64>>>,
}

impl LevelBlockPrior {
    pub fn new(a: f64, b: f64, depth: usize, block_size: usize) -> Self {
        let m_max = block_size;
        // lgamma lookup tables make each Beta-Binomial log-mass O(1).
        let lg_a: Vec<f64> = (0..=m_max)
            .map(|n| crate::special::ln_gamma(a + n as f64))
            .collect();
        let lg_b: Vec<f64> = (0..=m_max)
            .map(|n| crate::special::ln_gamma(b + n as f64))
            .collect();
        let lg_ab: Vec<f64> = (0..=m_max)
            .map(|n| crate::special::ln_gamma(a + b + n as f64))
            .collect();
        let lg_fact: Vec<f64> = (0..=m_max)
            .map(|n| crate::special::ln_gamma(n as f64 + 1.0))
            .collect();
        let ln_b0 = ln_beta(a, b);
        // log BetaBinomial(n | m, a, b)
        let lbb = |n: usize, m: usize| -> f64 {
            lg_fact[m] - lg_fact[n] - lg_fact[m - n] + lg_a[n] + lg_b[m - n] - lg_ab[m] - ln_b0
        };

        let mut log_t = vec![vec![f64::NEG_INFINITY; m_max + 1]; depth + 1];
        // After the last level no indicators may remain.
        log_t[depth][0] = 0.0;
        for k in (0..depth).rev() {
            for m in 0..=m_max {
                let terms: Vec<f64> = (0..=m)
                    .map(|n| lbb(n, m) + log_t[k + 1][m - n])
                    .collect();
                log_t[k][m] = log_sum_exp(&terms);
            }
        }
        let mut cdf = Vec::with_capacity(depth);
        for k in 0..depth {
            let mut rows = Vec::with_capacity(m_max + 1);
            for m in 0..=m_max {
                let mut acc = 0.0;
                let row: Vec<f64> = (0..=m)
                    .map(|n| {
                        acc += (lbb(n, m) + log_t[k + 1][m - n] - log_t[k][m]).exp();
                        acc
                    })
                    .collect();
                rows.push(row);
            }
            cdf.push(rows);
        }
        LevelBlockPrior {
            depth,
            block_size,
            log_t,
            cdf,
        }
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Log probability that a block of this size fits within the depth;
    /// the normalizer of the conditioned law.
    pub fn log_normalizer(&self) -> f64 {
        self.log_t[0][self.block_size]
    }

    /// Log probability of one specific indicator sequence with the given
    /// per-level counts (which must sum to the block size).
    pub fn log_prob_sequence(&self, a: f64, b: f64, counts: &[u32]) -> f64 {
        debug_assert_eq!(counts.len(), self.depth);
        debug_assert_eq!(
            counts.iter().map(|&c| c as usize).sum::<usize>(),
            self.block_size
        );
        log_block_weight(a, b, counts) - self.log_normalizer()
    }

    /// Draws per-level counts for one block.
    pub fn sample_counts<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        let mut counts = vec![0u32; self.depth];
        let mut remaining = self.block_size;
        for (count, rows) in counts.iter_mut().zip(&self.cdf) {
            let row = &rows[remaining];
            let u: f64 = rng.random();
            let n = row.partition_point(|&c| c < u).min(remaining);
            *count = n as u32;
            remaining -= n;
        }
        debug_assert_eq!(remaining, 0);
        counts
    }

    /// Draws a full indicator block, exchangeably ordered.
    pub fn sample_block<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Level> {
        let counts = self.sample_counts(rng);
        let mut block = Vec::with_capacity(self.block_size);
        for (k, &c) in counts.iter().enumerate() {
            block.extend(std::iter::repeat_n((k + 1) as Level, c as usize));
        }
        block.shuffle(rng);
        block
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn fixed_weights_renormalize() {
        let mv = MembershipVector::from_weights(&[1.0, 3.0]).unwrap();
        assert!((mv.theta()[0] - 0.25).abs() < 1e-12);
        assert!((mv.theta()[1] - 0.75).abs() < 1e-12);
        assert!(MembershipVector::from_weights(&[0.0, 0.0]).is_err());
        assert!(MembershipVector::from_weights(&[-1.0, 2.0]).is_err());
    }

    #[test]
    fn gem_theta_sums_to_one() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..100 {
            let mv = sample_gem(0.25, 0.25, 3, &mut rng);
            let sum: f64 = mv.theta().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert_eq!(mv.sticks().unwrap().len(), 3);
        }
    }

    #[test]
    fn concentrated_sticks_match_the_deterministic_limit() {
        // pi -> infinity pins every stick at m: with m = 0.25, K = 2 the raw
        // weights are (0.25, 0.1875), renormalized (0.571428..., 0.428571...).
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let m = 0.25;
        let pi = 1e9;
        let mv = sample_gem(m * pi, (1.0 - m) * pi, 2, &mut rng);
        assert!((mv.theta()[0] - 4.0 / 7.0).abs() < 1e-3);
        assert!((mv.theta()[1] - 3.0 / 7.0).abs() < 1e-3);
    }

    #[test]
    fn empty_counts_reduce_to_prior_weights() {
        // m = 0.5, pi = 1 (a = b = 0.5), K = 2: raw (1/2, 1/4), so the
        // normalized conditional is (2/3, 1/3).
        let w = predictive_weights(0.5, 0.5, &[0, 0]);
        let sum: f64 = w.iter().sum();
        assert!((w[0] / sum - 2.0 / 3.0).abs() < 1e-12);
        assert!((w[1] / sum - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn heavy_counts_dominate_the_predictive() {
        let w = predictive_weights(0.25, 0.25, &[1, 40]);
        assert!(w[1] > w[0] * 5.0);
    }

    #[test]
    fn predictive_matches_posterior_stick_moments() {
        // Monte-Carlo oracle: draw sticks from their Beta posteriors and
        // average theta; agreement within 1% at 1e5 draws.
        let (a, b) = (0.25, 0.75);
        let counts = [3u32, 2, 4];
        let w = predictive_weights(a, b, &counts);
        let n_gt = [6.0, 4.0, 0.0];
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut acc = [0.0f64; 3];
        let draws = 100_000;
        for _ in 0..draws {
            let mut carried = 1.0;
            for k in 0..3 {
                let post = Beta::new(a + counts[k] as f64, b + n_gt[k]).unwrap();
                let v = post.sample(&mut rng);
                acc[k] += carried * v;
                carried *= 1.0 - v;
            }
        }
        for k in 0..3 {
            let mc = acc[k] / draws as f64;
            assert!(
                (mc - w[k]).abs() < 0.01,
                "level {k}: predictive {} vs Monte-Carlo {mc}",
                w[k]
            );
        }
    }

    #[test]
    fn block_law_matches_enumeration_for_small_blocks() {
        // K = 2, M = 2, a = b = 0.25. Exact by hand: the four sequences have
        // unnormalized weights W(1,1)=0.41667, W(1,2)=W(2,1)=0.0416667,
        // W(2,2)=0.17361; the normalizer is 0.673611.
        let (a, b) = (0.25, 0.25);
        let prior = LevelBlockPrior::new(a, b, 2, 2);
        let z = prior.log_normalizer().exp();
        assert!((z - 0.6736111111).abs() < 1e-9, "normalizer {z}");
        let p11 = prior.log_prob_sequence(a, b, &[2, 0]).exp();
        let p12 = prior.log_prob_sequence(a, b, &[1, 1]).exp();
        let p22 = prior.log_prob_sequence(a, b, &[0, 2]).exp();
        assert!((p11 - 0.41666666 / 0.67361111).abs() < 1e-6);
        assert!((p12 - 0.04166666 / 0.67361111).abs() < 1e-6);
        assert!((p22 - 0.17361111 / 0.67361111).abs() < 1e-6);
        // Specific sequences tile the space: p11 + 2*p12 + p22 = 1.
        assert!((p11 + 2.0 * p12 + p22 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn block_sampler_frequencies_match_the_law() {
        let (a, b) = (0.25, 0.25);
        let prior = LevelBlockPrior::new(a, b, 2, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let draws = 200_000;
        let mut seen = [0u32; 3]; // n_1 in {0, 1, 2}
        for _ in 0..draws {
            let counts = prior.sample_counts(&mut rng);
            seen[counts[0] as usize] += 1;
        }
        let expect = [
            prior.log_prob_sequence(a, b, &[0, 2]).exp(),
            2.0 * prior.log_prob_sequence(a, b, &[1, 1]).exp(),
            prior.log_prob_sequence(a, b, &[2, 0]).exp(),
        ];
        for n in 0..3 {
            let freq = seen[n] as f64 / draws as f64;
            assert!(
                (freq - expect[n]).abs() < 0.005,
                "n_1 = {n}: frequency {freq} vs law {}",
                expect[n]
            );
        }
    }

    #[test]
    fn depth_one_blocks_are_deterministic() {
        let prior = LevelBlockPrior::new(0.5, 0.5, 1, 5);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        assert_eq!(prior.sample_block(&mut rng), vec![1, 1, 1, 1, 1]);
        assert!((prior.log_prob_sequence(0.5, 0.5, &[5])).abs() < 1e-12);
    }
}
