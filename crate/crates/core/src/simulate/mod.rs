//! Exact and Palm-conditioned samplers and Monte Carlo estimators.
//!
//! Replicate `k` of a run with seed `s` draws from a ChaCha8 generator seeded
//! with `seed_from_u64(s)` and switched to stream `k`, so every replicate is
//! a pure function of `(s, k)` and results do not depend on how the
//! replicates are scheduled across threads.

mod estimate;
mod grid;
mod sampler;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FadingModel, HardCoreParams};

pub use estimate::{
    estimate_intensity, estimate_k_function, estimate_mean_interference, palm_acceptance_rate,
    palm_ensemble, IntensityEstimate, KEstimate,
};
pub use sampler::{
    sample_palm, sample_palm_poisson_hole, sample_palm_type1, sample_palm_type2, sample_parent,
    sample_stationary, thin_type1, thin_type2, PalmSample, Region, ThinnedPattern,
    MAX_TYPE2_ATTEMPTS, MIN_TYPE2_ACCEPTANCE,
};

/// Whether the mean interference from beyond the window is added analytically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailPolicy {
    AnalyticTail,
    TruncateOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Observation radius R around the origin.
    pub window_radius: f64,
    /// Extra parent margin beyond R used only for thinning decisions.
    pub guard: f64,
    pub replicates: usize,
    pub seed: u64,
    pub fading: FadingModel,
    pub tail_policy: TailPolicy,
}

impl SimulationConfig {
    /// Defaults for `params`: R = max(10δ, 20/√λ_p), guard δ, 1000 replicates,
    /// seed 0, no fading and an analytic tail.
    pub fn for_params(params: &HardCoreParams) -> Self {
        Self {
            window_radius: default_window_radius(params),
            guard: params.delta(),
            replicates: 1000,
            seed: 0,
            fading: FadingModel::None,
            tail_policy: TailPolicy::AnalyticTail,
        }
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_window_radius(mut self, window_radius: f64) -> Self {
        self.window_radius = window_radius;
        self
    }

    pub fn with_fading(mut self, fading: FadingModel) -> Self {
        self.fading = fading;
        self
    }

    pub fn with_tail_policy(mut self, tail_policy: TailPolicy) -> Self {
        self.tail_policy = tail_policy;
        self
    }

    pub fn validate(&self, params: &HardCoreParams) -> Result<()> {
        let d = params.delta();
        if !(self.guard.is_finite() && self.guard >= d) {
            return Err(Error::Config(format!(
                "guard {} must be finite and at least the hard-core distance {d}",
                self.guard
            )));
        }
        if !(self.window_radius.is_finite() && self.window_radius >= 2.0 * d + self.guard) {
            return Err(Error::Config(format!(
                "window radius {} must be at least 2*delta + guard = {}",
                self.window_radius,
                2.0 * d + self.guard
            )));
        }
        if self.window_radius <= 0.0 {
            return Err(Error::Config("window radius must be positive".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("at least one replicate is required".into()));
        }
        Ok(())
    }
}

pub fn default_window_radius(params: &HardCoreParams) -> f64 {
    (10.0 * params.delta()).max(20.0 / params.lambda_p().sqrt())
}

/// Generator for replicate `k` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}
