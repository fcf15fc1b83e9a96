//! Model hyperparameters.

use crate::error::{HmmsbError, Result};
use serde::{Deserialize, Serialize};

/// Hyperparameters of the hierarchical blockmodel.
///
/// `gamma` is the nested CRP concentration; `(m, pi)` parameterize the
/// two-parameter stick-breaking prior over levels, with stick fractions
/// `V ~ Beta(m*pi, (1-m)*pi)`; `(lambda1, lambda2)` are the Beta prior on
/// blockmodel entries; `max_depth` is the fixed hierarchy depth `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub gamma: f64,
    pub m: f64,
    pub pi: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub max_depth: usize,
}

impl Hyperparams {
    /// Validates ranges: `gamma > 0`, `m` strictly inside `(0, 1)`, `pi > 0`,
    /// both `lambda` pseudo-counts positive, `1 <= max_depth <= 255`.
    pub fn new(
        gamma: f64,
        m: f64,
        pi: f64,
        lambda1: f64,
        lambda2: f64,
        max_depth: usize,
    ) -> Result<Self> {
        let h = Hyperparams {
            gamma,
            m,
            pi,
            lambda1,
            lambda2,
            max_depth,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(HmmsbError::Config(msg.to_string()))
            }
        }
        check(
            self.gamma.is_finite() && self.gamma > 0.0,
            "gamma must be finite and > 0",
        )?;
        check(
            self.m.is_finite() && self.m > 0.0 && self.m < 1.0,
            "m must lie strictly in (0, 1)",
        )?;
        check(
            self.pi.is_finite() && self.pi > 0.0,
            "pi must be finite and > 0",
        )?;
        check(
            self.lambda1.is_finite() && self.lambda1 > 0.0,
            "lambda1 must be finite and > 0",
        )?;
        check(
            self.lambda2.is_finite() && self.lambda2 > 0.0,
            "lambda2 must be finite and > 0",
        )?;
        check(
            self.max_depth >= 1 && self.max_depth <= u8::MAX as usize,
            "max_depth must lie in 1..=255",
        )?;
        Ok(())
    }

    /// Stick-breaking Beta shape `m * pi`.
    pub fn gem_a(&self) -> f64 {
        self.m * self.pi
    }

    /// Stick-breaking Beta shape `(1 - m) * pi`.
    pub fn gem_b(&self) -> f64 {
        (1.0 - self.m) * self.pi
    }

    /// Convenience preset used throughout the simulation study:
    /// `m = pi = lambda1 = lambda2 = 0.5` with caller-chosen `gamma` and depth.
    pub fn simulation_default(gamma: f64, max_depth: usize) -> Result<Self> {
        Hyperparams::new(gamma, 0.5, 0.5, 0.5, 0.5, max_depth)
    }
}
