//! Mean interference at the typical point and the excess interference ratio.
//!
//! The Palm mean is E(I) = λ ∫ g(r) K′(r) dr. Beyond 2δ both Matérn types
//! have exactly Poisson second-order structure, so every computation splits
//! into a near part on [δ, 2δ], integrated numerically or bounded in closed
//! form, and a far part on (2δ, ∞) that is known analytically.

use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use crate::analytic::{chord_bound, lens_overlap, normalized_pair_type2, tangent_bound, AffineVBound};
use crate::error::{Error, Result};
use crate::model::{intensity, HardCoreParams, PathLossModel, ProcessKind, QuadratureConfig};
use crate::numerics::{integrate, upper_incomplete_gamma_scaled};

/// How an EIR value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EirMethod {
    Quadrature,
    /// Universal type II bound, sharpened for power laws.
    UpperBound,
    /// Large λ_p δ² approximation for type I.
    Approximation,
}

impl std::fmt::Display for EirMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EirMethod::Quadrature => "quadrature",
            EirMethod::UpperBound => "upper_bound",
            EirMethod::Approximation => "approximation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EirReport {
    pub mean_hardcore: f64,
    pub mean_poisson_hole: f64,
    pub eir_linear: f64,
    pub eir_db: f64,
    pub method: EirMethod,
}

impl EirReport {
    fn new(eir_linear: f64, mean_poisson_hole: f64, method: EirMethod) -> Self {
        Self {
            mean_hardcore: eir_linear * mean_poisson_hole,
            mean_poisson_hole,
            eir_linear,
            eir_db: to_db(eir_linear),
            method,
        }
    }
}

/// 10·log10(x).
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Mean interference split at r = 2δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSplit {
    /// Contribution of nodes at distance in [δ, 2δ].
    pub near: f64,
    /// Contribution of nodes beyond 2δ.
    pub far: f64,
}

impl InterferenceSplit {
    pub fn total(&self) -> f64 {
        self.near + self.far
    }
}

fn diverges() -> Error {
    Error::domain(
        "mean interference diverges: path loss is not integrable at the origin (r0 = 0 with delta = 0)",
    )
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(diverges())
    }
}

/// λ·K′(r), the mean density of interferers at distance r from the typical point.
fn interferer_density(params: &HardCoreParams, r: f64) -> f64 {
    let lp = params.lambda_p();
    match params.kind() {
        ProcessKind::PoissonHole => 2.0 * PI * lp * r,
        ProcessKind::MaternI => {
            // λ (λ_p/λ)² e^{-λ_p V} = λ_p e^{λ_p (overlap - πδ²)}
            let d = params.delta();
            2.0 * PI * lp * r * (lp * (lens_overlap(d, r) - params.disk_area())).exp()
        }
        ProcessKind::MaternII => {
            let n = normalized_pair_type2(params, r).unwrap_or(0.0);
            2.0 * PI * intensity(params) * r * n
        }
    }
}

/// Near and far parts of E(I) for the process in `params`.
pub fn mean_interference_split(
    params: &HardCoreParams,
    pathloss: &PathLossModel,
    quad: &QuadratureConfig,
) -> Result<InterferenceSplit> {
    pathloss.check_compatible(params)?;
    let d = params.delta();
    let lambda = intensity(params);
    let far = finite(2.0 * PI * lambda * pathloss.radial_moment(2.0 * d, f64::INFINITY))?;
    if d == 0.0 {
        return Ok(InterferenceSplit { near: 0.0, far });
    }
    let cfg = quad.with_breakpoints(
        std::iter::once(1.5 * d).chain(pathloss.kinks_in(d, 2.0 * d)),
    );
    let near = integrate(
        |r| pathloss.eval(r) * interferer_density(params, r),
        d,
        2.0 * d,
        &cfg,
    )?
    .into_value("near-field interference quadrature", cfg.rel_tol)?;
    Ok(InterferenceSplit { near, far })
}

/// E(I) = λ ∫ g(r) K′(r) dr by quadrature on [δ, 2δ] plus the exact tail.
pub fn mean_interference_quadrature(
    params: &HardCoreParams,
    pathloss: &PathLossModel,
    quad: &QuadratureConfig,
) -> Result<f64> {
    Ok(mean_interference_split(params, pathloss, quad)?.total())
}

/// Mean interference in the Poisson process of the same intensity as
/// `params` with no nodes closer than δ: 2πλ ∫_δ^∞ g(r) r dr, which is
/// 2πλ δ^{2-α}/(α-2) for a power law.
pub fn mean_interference_poisson_hole(params: &HardCoreParams, pathloss: &PathLossModel) -> Result<f64> {
    pathloss.check_compatible(params)?;
    let lambda = intensity(params);
    let d = params.delta();
    match pathloss.pure_power_beyond(d) {
        Some(alpha) if d > 0.0 => Ok(2.0 * PI * lambda * d.powf(2.0 - alpha) / (alpha - 2.0)),
        _ => finite(2.0 * PI * lambda * pathloss.radial_moment(d, f64::INFINITY)),
    }
}

/// Mean interference from nodes beyond 2δ, identical to the equi-dense
/// Poisson process: 2πλ (2δ)^{2-α}/(α-2) for a power law.
pub fn interference_outside_2delta(params: &HardCoreParams, pathloss: &PathLossModel) -> Result<f64> {
    pathloss.check_compatible(params)?;
    let lambda = intensity(params);
    let d = params.delta();
    match pathloss.pure_power_beyond(d) {
        Some(alpha) if d > 0.0 => {
            Ok(2.0 * PI * lambda * (2.0 * d).powf(2.0 - alpha) / (alpha - 2.0))
        }
        _ => finite(2.0 * PI * lambda * pathloss.radial_moment(2.0 * d, f64::INFINITY)),
    }
}

fn check_h_args(v: f64, x: f64, alpha: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0 && x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("H(v, x) needs v > 0 and x > 0, got v = {v}, x = {x}")));
    }
    if !(alpha.is_finite() && alpha > 2.0) {
        return Err(Error::domain(format!("H(v, x) needs alpha > 2, got {alpha}")));
    }
    Ok(())
}

/// ln H(v, x) where H(v, x) = ∫_x^{2x} r^{1-α} e^{-vr} dr
/// = v^{α-2} (Γ(2-α, vx) - Γ(2-α, 2vx)).
///
/// Evaluated through the scaled incomplete gamma so that large vx neither
/// overflows nor underflows.
pub fn ln_h_integral(v: f64, x: f64, alpha: f64) -> Result<f64> {
    check_h_args(v, x, alpha)?;
    let s = 2.0 - alpha;
    let y = v * x;
    // v^{-s} Γ(s, y) = x^s e^{-y} S(y), with S the scaled gamma
    let near = upper_incomplete_gamma_scaled(s, y)?;
    let far = upper_incomplete_gamma_scaled(s, 2.0 * y)?;
    let bracket = near - (s * std::f64::consts::LN_2 - y).exp() * far;
    Ok(s * x.ln() - y + bracket.ln())
}

/// H(v, x) for the power path loss r^{-α}.
pub fn h_integral(v: f64, x: f64, alpha: f64) -> Result<f64> {
    Ok(ln_h_integral(v, x, alpha)?.exp())
}

/// h(a, b) = 2πλ_p e^{-λ_p a δ²} ∫_δ^{2δ} g(r) r e^{-λ_p b δ r} dr.
///
/// With the tangent constants this is a lower bound on the near-field mean
/// interference of type I; with the chord constants an upper bound.
pub fn h_bound(
    params: &HardCoreParams,
    pathloss: &PathLossModel,
    bound: &AffineVBound,
    quad: &QuadratureConfig,
) -> Result<f64> {
    pathloss.check_compatible(params)?;
    let lp = params.lambda_p();
    let d = params.delta();
    if d == 0.0 {
        return Ok(0.0);
    }
    let prefactor = (2.0 * PI * lp).ln() - lp * bound.a * d * d;
    if let Some(alpha) = pathloss.pure_power_beyond(d) {
        return Ok((prefactor + ln_h_integral(lp * bound.b * d, d, alpha)?).exp());
    }
    let cfg = quad.with_breakpoints(pathloss.kinks_in(d, 2.0 * d));
    let rate = lp * bound.b * d;
    let integral = integrate(
        |r| pathloss.eval(r) * r * (-rate * r).exp(),
        d,
        2.0 * d,
        &cfg,
    )?
    .into_value("h bound quadrature", cfg.rel_tol)?;
    Ok(prefactor.exp() * integral)
}

/// Lower and upper bounds `(h(a̲, b̲), h(ā, b̄))` on the near-field mean
/// interference of type I.
pub fn near_field_bounds(
    params: &HardCoreParams,
    pathloss: &PathLossModel,
    quad: &QuadratureConfig,
) -> Result<(f64, f64)> {
    Ok((
        h_bound(params, pathloss, &tangent_bound(), quad)?,
        h_bound(params, pathloss, &chord_bound(), quad)?,
    ))
}

/// EIR = 2^{2-α} (I_near / I_far + 1) for power laws.
pub fn eir_from_split(near: f64, far: f64, alpha: f64) -> f64 {
    (near / far + 1.0) * 2f64.powf(2.0 - alpha)
}

/// Excess interference ratio of the process in `params` against the Poisson
/// process of equal intensity with a hole of radius δ.
pub fn eir(
    params: &HardCoreParams,
    pathloss: &PathLossModel,
    method: EirMethod,
    quad: &QuadratureConfig,
) -> Result<EirReport> {
    pathloss.check_compatible(params)?;
    let d = params.delta();
    if d == 0.0 || params.kind() == ProcessKind::PoissonHole {
        let reference = match mean_interference_poisson_hole(params, pathloss) {
            Ok(v) => v,
            Err(_) if d == 0.0 => f64::INFINITY,
            Err(e) => return Err(e),
        };
        return Ok(EirReport {
            mean_hardcore: reference,
            mean_poisson_hole: reference,
            eir_linear: 1.0,
            eir_db: 0.0,
            method,
        });
    }
    let reference = mean_interference_poisson_hole(params, pathloss)?;
    match (method, params.kind()) {
        (EirMethod::Quadrature, _) => {
            let split = mean_interference_split(params, pathloss, quad)?;
            let ratio = match pathloss.pure_power_beyond(d) {
                Some(alpha) => eir_from_split(split.near, split.far, alpha),
                None => split.total() / reference,
            };
            Ok(EirReport {
                mean_hardcore: split.total(),
                mean_poisson_hole: reference,
                eir_linear: ratio,
                eir_db: to_db(ratio),
                method,
            })
        }
        (EirMethod::UpperBound, ProcessKind::MaternII) => {
            let bound = eir_type2_bound(pathloss.alpha())?;
            Ok(EirReport::new(bound, reference, method))
        }
        (EirMethod::Approximation, ProcessKind::MaternI) => {
            let alpha = pathloss.alpha().ok_or_else(|| {
                Error::Unsupported("the type I approximation needs a power path loss".into())
            })?;
            Ok(eir_type1_approximation(params, alpha)?.report)
        }
        (method, kind) => Err(Error::Unsupported(format!(
            "{method} EIR is not available for {kind}"
        ))),
    }
}

/// π - a̲ - b̲, the exponent of the type I EIR growth in λ_p δ². Exceeds 1.
pub fn type1_growth_exponent() -> f64 {
    let t = tangent_bound();
    PI - t.a - t.b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Type1Approximation {
    pub report: EirReport,
    /// π - a̲ - b̲.
    pub growth_exponent: f64,
    /// λ_p δ² > 4, where the approximation is known to be close.
    pub accurate_regime: bool,
}

/// EIR ≈ (α-2) 2^{α-2} e^{λ_p δ² (π-a̲-b̲)} / (λ_p b̲ δ²) for type I,
/// evaluated in the log domain.
pub fn eir_type1_approximation(params: &HardCoreParams, alpha: f64) -> Result<Type1Approximation> {
    if params.kind() != ProcessKind::MaternI {
        return Err(Error::Unsupported(format!(
            "the approximation applies to Matérn type I, not {}",
            params.kind()
        )));
    }
    if !(alpha > 2.0) {
        return Err(Error::domain(format!("alpha must exceed 2, got {alpha}")));
    }
    let lp = params.lambda_p();
    let d = params.delta();
    if d == 0.0 {
        return Err(Error::domain("the type I approximation needs delta > 0"));
    }
    let growth = type1_growth_exponent();
    debug_assert!(growth > 1.0);
    let b = tangent_bound().b;
    let x = lp * d * d;
    let ln_eir = (alpha - 2.0).ln() + (alpha - 2.0) * std::f64::consts::LN_2 + x * growth - (lp * b * d * d).ln();
    let reference = 2.0 * PI * intensity(params) * d.powf(2.0 - alpha) / (alpha - 2.0);
    let eir_linear = ln_eir.exp();
    Ok(Type1Approximation {
        report: EirReport {
            mean_hardcore: eir_linear * reference,
            mean_poisson_hole: reference,
            eir_linear,
            eir_db: 10.0 * ln_eir / LN_10,
            method: EirMethod::Approximation,
        },
        growth_exponent: growth,
        accurate_regime: x > 4.0,
    })
}

/// ν = 12π/(8π + 3√3) = 2π/(4π/3 + √3/2), the universal type II EIR bound.
pub fn nu() -> f64 {
    12.0 * PI / (8.0 * PI + 3.0 * 3f64.sqrt())
}

/// Type II EIR bound: ν for arbitrary path loss, ν - (ν-1)/2^{α-2} for a
/// power law with exponent α.
pub fn eir_type2_bound(alpha: Option<f64>) -> Result<f64> {
    let nu = nu();
    match alpha {
        None => Ok(nu),
        Some(a) if a > 2.0 => Ok(nu - (nu - 1.0) * 2f64.powf(2.0 - a)),
        Some(a) => Err(Error::domain(format!("alpha must exceed 2, got {a}"))),
    }
}
