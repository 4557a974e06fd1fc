use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model and optimizer settings. Defaults use `θ = 1`, `ρ = 100`, `λ = 1e-4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparameters {
    /// Number of clusters `C`.
    pub clusters: usize,
    /// Weight of the factor-to-consensus coupling.
    pub theta: f64,
    /// Weight of the seed-mask penalty.
    pub rho: f64,
    /// Weight of the entrywise l1 penalty on factors.
    pub lambda: f64,
    /// Initial step of the projected gradient search on motif weights.
    pub pgd_step: f64,
    pub inner_tol: f64,
    pub outer_tol: f64,
    pub max_inner_iters: usize,
    pub max_outer_iters: usize,
    pub max_pgd_iters: usize,
    /// Added to every denominator entry of the multiplicative update.
    pub eps_div: f64,
    pub init_seed: u64,
    /// Multiplier applied at init to the permitted-cluster entry of seed columns.
    /// 1 disables it.
    pub seed_boost: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            clusters: 2,
            theta: 1.0,
            rho: 100.0,
            lambda: 1e-4,
            pgd_step: 1.0,
            inner_tol: 1e-4,
            outer_tol: 1e-6,
            max_inner_iters: 50,
            max_outer_iters: 100,
            max_pgd_iters: 100,
            eps_div: 1e-12,
            init_seed: 0,
            seed_boost: 1.0,
        }
    }
}

impl Hyperparameters {
    pub fn with_clusters(clusters: usize) -> Self {
        Hyperparameters {
            clusters,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidHyperparameter(m.to_owned()));
        if self.clusters < 2 {
            return bad("clusters must be at least 2");
        }
        for (name, v) in [("theta", self.theta), ("rho", self.rho), ("lambda", self.lambda)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidHyperparameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("inner_tol", self.inner_tol),
            ("outer_tol", self.outer_tol),
            ("eps_div", self.eps_div),
            ("pgd_step", self.pgd_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidHyperparameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        if !(self.seed_boost > 0.0 && self.seed_boost.is_finite()) {
            return bad("seed_boost must be finite and positive");
        }
        if self.max_inner_iters == 0 || self.max_outer_iters == 0 || self.max_pgd_iters == 0 {
            return bad("iteration caps must be at least 1");
        }
        Ok(())
    }
}
