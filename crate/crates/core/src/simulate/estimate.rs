use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{sample_palm, sample_stationary};
use super::{replicate_rng, SimulationConfig, TailPolicy};
use crate::error::{Error, Result};
use crate::model::{intensity, HardCoreParams, InterferenceEstimate, PathLossModel, PointPattern, ProcessKind};
use crate::numerics::compensated_sum;

const Z95: f64 = 1.959963984540054;

/// Sample mean and standard error of the mean.
fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0) / n).sqrt())
}

fn run_replicates<T, F>(cfg: &SimulationConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<T> + Sync,
{
    (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|k| f(&mut replicate_rng(cfg.seed, k)))
        .collect()
}

/// Interference at the origin from a Palm pattern with r ≤ R, Poisson-hole
/// case drawn from radii alone since the angles do not matter.
fn palm_interference<R: Rng + ?Sized>(
    params: &HardCoreParams,
    pathloss: &PathLossModel,
    cfg: &SimulationConfig,
    rng: &mut R,
) -> Result<f64> {
    let fading = cfg.fading.sampler();
    if params.kind() == ProcessKind::PoissonHole {
        let (a, b) = (params.delta(), cfg.window_radius);
        let mean = params.lambda_p() * PI * (b * b - a * a);
        let n = if mean > 0.0 {
            let n: f64 = rand_distr::Distribution::sample(&rand_distr::Poisson::new(mean).expect("finite mean"), rng);
            n as usize
        } else {
            0
        };
        let mut total = 0.0;
        for _ in 0..n {
            let r = (a * a + rng.random::<f64>() * (b * b - a * a)).sqrt();
            total += fading.draw(rng) * pathloss.eval(r);
        }
        return Ok(total);
    }
    let sample = sample_palm(params, cfg, rng)?;
    let mut total = 0.0;
    for p in sample.pattern.points() {
        total += fading.draw(rng) * pathloss.eval((p[0] * p[0] + p[1] * p[1]).sqrt());
    }
    Ok(total)
}

/// Monte Carlo estimate of the mean Palm interference E_o^!(I).
///
/// Each replicate sums h_x g(‖x‖) over the Palm sample inside the window.
/// With [`TailPolicy::AnalyticTail`] the mean contribution of points beyond
/// R, 2πλ ∫_R^∞ g(r) r dr, is added to the mean; it carries no sampling error.
pub fn estimate_mean_interference(
    params: &HardCoreParams,
    pathloss: &PathLossModel,
    cfg: &SimulationConfig,
) -> Result<InterferenceEstimate> {
    cfg.validate(params)?;
    pathloss.check_compatible(params)?;
    let tail = match cfg.tail_policy {
        TailPolicy::AnalyticTail => {
            2.0 * PI * intensity(params) * pathloss.radial_moment(cfg.window_radius, f64::INFINITY)
        }
        TailPolicy::TruncateOnly => 0.0,
    };
    if !tail.is_finite() {
        return Err(Error::Config("path loss tail integral diverges".into()));
    }
    let values = run_replicates(cfg, |rng| palm_interference(params, pathloss, cfg, rng))?;
    let (mean, se) = mean_and_se(&values);
    let mean = mean + tail;
    Ok(InterferenceEstimate {
        mean,
        std_error: se,
        ci_low: mean - Z95 * se,
        ci_high: mean + Z95 * se,
        replicates: values.len(),
        tail_correction: tail,
    })
}

/// `cfg.replicates` Palm samples, in replicate order.
pub fn palm_ensemble(params: &HardCoreParams, cfg: &SimulationConfig) -> Result<Vec<PointPattern>> {
    cfg.validate(params)?;
    run_replicates(cfg, |rng| Ok(sample_palm(params, cfg, rng)?.pattern))
}

/// Fraction of type II Palm proposals accepted over `cfg.replicates` samples.
/// It estimates λ/λ_p.
pub fn palm_acceptance_rate(params: &HardCoreParams, cfg: &SimulationConfig) -> Result<f64> {
    if params.kind() != ProcessKind::MaternII {
        return Err(Error::Unsupported(format!(
            "Palm sampling of {} involves no rejection step",
            params.kind()
        )));
    }
    cfg.validate(params)?;
    let attempts = run_replicates(cfg, |rng| Ok(sample_palm(params, cfg, rng)?.attempts))?;
    let total: u64 = attempts.iter().sum();
    Ok(attempts.len() as f64 / total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityEstimate {
    pub value: f64,
    pub std_error: f64,
    pub replicates: usize,
}

impl IntensityEstimate {
    /// A known intensity with no sampling error.
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            replicates: 0,
        }
    }
}

/// Empirical intensity from stationary samples on the disk of radius R,
/// counting only points within R − guard, where thinning is exact.
pub fn estimate_intensity(params: &HardCoreParams, cfg: &SimulationConfig) -> Result<IntensityEstimate> {
    cfg.validate(params)?;
    let inner = cfg.window_radius - cfg.guard;
    let area = PI * inner * inner;
    let values = run_replicates(cfg, |rng| {
        let sample = sample_stationary(params, cfg, rng)?;
        Ok(sample.pattern.count_within(inner) as f64 / area)
    })?;
    let (value, std_error) = mean_and_se(&values);
    Ok(IntensityEstimate {
        value,
        std_error,
        replicates: values.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub r: f64,
    pub k: f64,
    pub std_error: f64,
}

/// Empirical K function: the mean number of Palm points within r of the
/// origin divided by `lambda`. The standard error combines the count
/// variance with the uncertainty of `lambda` to first order.
pub fn estimate_k_function(
    ensemble: &[PointPattern],
    radii: &[f64],
    lambda: &IntensityEstimate,
) -> Result<Vec<KEstimate>> {
    if ensemble.is_empty() {
        return Err(Error::Input("K estimation needs at least one Palm pattern".into()));
    }
    if !(lambda.value > 0.0 && lambda.value.is_finite()) {
        return Err(Error::Input(format!("intensity must be positive, got {}", lambda.value)));
    }
    let window = ensemble
        .iter()
        .map(PointPattern::window_radius)
        .fold(f64::INFINITY, f64::min);
    radii
        .iter()
        .map(|&r| {
            if !(r >= 0.0) || r > window {
                return Err(Error::Input(format!(
                    "radius {r} is outside the observed window [0, {window}]"
                )));
            }
            let counts: Vec<f64> = ensemble.iter().map(|p| p.count_within(r) as f64).collect();
            let (m, se_m) = mean_and_se(&counts);
            let l = lambda.value;
            let k = m / l;
            let std_error = ((se_m / l).powi(2) + (m * lambda.std_error / (l * l)).powi(2)).sqrt();
            Ok(KEstimate { r, k, std_error })
        })
        .collect()
}
