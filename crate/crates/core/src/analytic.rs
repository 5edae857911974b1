//! Closed-form second-order quantities of the Matérn hard-core processes.
//!
//! All K-functions here are normalized by the intensity: K(r) is the mean
//! number of further points within distance r of the typical point, divided
//! by λ. Pair retention probabilities are expressed through the union area
//! V_δ(u) of two radius-δ disks with centers u apart.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{intensity, HardCoreParams, ProcessKind, QuadratureConfig};
use crate::numerics::integrate;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const SQRT7: f64 = 2.645_751_311_064_590_6;

/// π/3 + √3/4, the tangent constant of the K(2δ) lower bound.
pub const C1_KBOUND: f64 = PI / 3.0 + SQRT3 / 4.0;

/// 4π/3 + √3/2 = V_δ(δ)/δ², the union area at distance δ.
pub const C2_LENS: f64 = 4.0 * PI / 3.0 + SQRT3 / 2.0;

/// λ_p·V below which type II pair retention switches to its series form.
const TYPE2_SERIES_SEAM: f64 = 1e-4;

/// Area of the union of two disks of radius `delta` whose centers are `u` apart.
pub fn v_union(delta: f64, u: f64) -> f64 {
    let area = PI * delta * delta;
    2.0 * area - lens_overlap(delta, u)
}

/// Area of the intersection of the two disks, 2πδ² - V_δ(u). Zero beyond 2δ.
pub fn lens_overlap(delta: f64, u: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let u = u.abs();
    if u >= 2.0 * delta {
        return 0.0;
    }
    let ratio = (u / (2.0 * delta)).min(1.0);
    let half_chord = (delta * delta - u * u / 4.0).max(0.0).sqrt();
    2.0 * delta * delta * ratio.acos() - u * half_chord
}

/// Which side of V_δ an affine form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    /// Tangent at r = 3δ/2; lies above the concave V_δ.
    UpperOnV,
    /// Chord through r = δ and r = 2δ; lies below V_δ.
    LowerOnV,
}

/// Affine form (π + a)δ² + b·δ·r bounding V_δ(r) on δ < r < 2δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineVBound {
    pub a: f64,
    pub b: f64,
    pub side: BoundSide,
}

impl AffineVBound {
    pub fn eval(&self, delta: f64, r: f64) -> f64 {
        (PI + self.a) * delta * delta + self.b * delta * r
    }
}

/// Returns `(lower_on_v, upper_on_v)`: the chord and the tangent bounds.
///
/// An upper bound on V yields a lower bound on interference and vice versa.
pub fn affine_v_bounds() -> (AffineVBound, AffineVBound) {
    (chord_bound(), tangent_bound())
}

pub(crate) fn tangent_bound() -> AffineVBound {
    AffineVBound {
        a: 2.0 * (0.75f64).asin() - 3.0 * SQRT7 / 8.0,
        b: SQRT7 / 2.0,
        side: BoundSide::UpperOnV,
    }
}

pub(crate) fn chord_bound() -> AffineVBound {
    AffineVBound {
        a: SQRT3 - PI / 3.0,
        b: 2.0 * PI / 3.0 - SQRT3 / 2.0,
        side: BoundSide::LowerOnV,
    }
}

/// Probability that two parent points at distance `u` both survive type I
/// thinning.
pub fn pair_retention_type1(params: &HardCoreParams, u: f64) -> f64 {
    let delta = params.delta();
    if u < delta {
        return 0.0;
    }
    (-params.lambda_p() * v_union(delta, u)).exp()
}

/// Probability that two parent points at distance `r ≥ δ` both survive type
/// II thinning.
pub fn pair_retention_type2(params: &HardCoreParams, r: f64) -> Result<f64> {
    let delta = params.delta();
    if delta == 0.0 {
        return Ok(1.0);
    }
    if !(r >= delta) {
        return Err(Error::domain(format!(
            "type II pair retention needs r >= delta, got r = {r} < {delta}"
        )));
    }
    let lp = params.lambda_p();
    let a = params.disk_area();
    let v = v_union(delta, r);
    if lp * v < TYPE2_SERIES_SEAM {
        // k = 1 - λ(A+V)/3 + λ²(A² + AV + V²)/12 + O(λ³)
        return Ok(1.0 - lp * (a + v) / 3.0 + lp * lp * (a * a + a * v + v * v) / 12.0);
    }
    let one_minus_a = -(-lp * a).exp_m1();
    let one_minus_v = -(-lp * v).exp_m1();
    let num = 2.0 * v * one_minus_a - 2.0 * a * one_minus_v;
    Ok(num / (lp * lp * a * v * (v - a)))
}

/// (λ_p/λ)²·k(r) for type II: the pair density relative to a Poisson process
/// of the same intensity. Identically 1 for r ≥ 2δ.
pub fn normalized_pair_type2(params: &HardCoreParams, r: f64) -> Result<f64> {
    let k = pair_retention_type2(params, r)?;
    let ratio = params.lambda_p() / intensity(&params.with_kind(ProcessKind::MaternII));
    Ok(ratio * ratio * k)
}

/// K′(r), the radial density of the normalized second moment measure.
pub fn k_derivative(params: &HardCoreParams, r: f64) -> f64 {
    let delta = params.delta();
    if r < delta || r < 0.0 {
        return 0.0;
    }
    let poisson = 2.0 * PI * r;
    if r >= 2.0 * delta {
        return poisson;
    }
    match params.kind() {
        ProcessKind::PoissonHole => poisson,
        // (λ_p/λ)² exp(-λ_p V) = exp(λ_p (2πδ² - V))
        ProcessKind::MaternI => poisson * (params.lambda_p() * lens_overlap(delta, r)).exp(),
        ProcessKind::MaternII => {
            poisson * normalized_pair_type2(params, r).expect("r >= delta checked above")
        }
    }
}

/// K(r). For the Matérn types the part on [δ, min(r, 2δ)] is integrated
/// numerically; beyond 2δ the pair density is exactly Poisson and K grows by
/// π(r² - 4δ²).
pub fn k_function(params: &HardCoreParams, r: f64, quad: &QuadratureConfig) -> Result<f64> {
    let delta = params.delta();
    if !(r >= 0.0) {
        return Err(Error::domain(format!("radius must be nonnegative, got {r}")));
    }
    if r < delta {
        return Ok(0.0);
    }
    if delta == 0.0 {
        return Ok(PI * r * r);
    }
    if params.kind() == ProcessKind::PoissonHole {
        return Ok(PI * (r * r - delta * delta));
    }
    let upper = r.min(2.0 * delta);
    let cfg = quad.with_breakpoints([1.5 * delta]);
    let near = integrate(|u| k_derivative(params, u), delta, upper, &cfg)?
        .into_value("K-function quadrature", cfg.rel_tol)?;
    let far = if r > 2.0 * delta {
        PI * (r * r - 4.0 * delta * delta)
    } else {
        0.0
    };
    Ok(near + far)
}

/// Closed-form lower bound on K(2δ) for type I:
/// (2π/(√3 λ_p)) [exp(λ_p δ² (2π/3 - √3/2)) - 1].
pub fn k2delta_lower_bound(params: &HardCoreParams) -> Result<f64> {
    if params.kind() != ProcessKind::MaternI {
        return Err(Error::Unsupported(format!(
            "the K(2δ) lower bound applies to Matérn type I, not {}",
            params.kind()
        )));
    }
    let lp = params.lambda_p();
    let d2 = params.delta() * params.delta();
    let exponent = lp * d2 * (2.0 * C1_KBOUND - SQRT3);
    Ok(2.0 * PI / (SQRT3 * lp) * exponent.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(lp: f64, d: f64, kind: ProcessKind) -> HardCoreParams {
        HardCoreParams::new(lp, d, kind).unwrap()
    }

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn union_area_examples() {
        assert!((v_union(1.0, 0.0) - PI).abs() < 1e-15);
        assert!((v_union(1.0, 1.0) - (4.0 * PI / 3.0 + 3f64.sqrt() / 2.0)).abs() < 1e-14);
        assert!((v_union(1.0, 1.0) - 5.054_815_608_570_829_6).abs() < 1e-14);
        assert!((v_union(1.0, 2.0) - 2.0 * PI).abs() < 1e-15);
        assert_eq!(v_union(1.0, 7.0), 2.0 * PI);
        assert_eq!(v_union(0.0, 3.0), 0.0);
        // rounding at u = 2δ must not produce NaN
        let d = 0.1 + 0.2;
        assert!(v_union(d, 2.0 * d * (1.0 - 1e-17)).is_finite());
    }

    #[test]
    fn affine_constants() {
        // 40-digit reference values
        let (chord, tangent) = affine_v_bounds();
        assert!((tangent.a - 0.703_967_416_313_740_5).abs() < 1e-15);
        assert!((tangent.b - 1.322_875_655_532_295_3).abs() < 1e-15);
        assert!((chord.a - 0.684_853_256_372_279_5).abs() < 1e-15);
        assert!((chord.b - 1.228_369_698_608_756_8).abs() < 1e-15);
        assert_eq!(tangent.side, BoundSide::UpperOnV);
        assert_eq!(chord.side, BoundSide::LowerOnV);
        // chord passes through V_δ(δ)
        assert!(((PI + chord.a) + chord.b - C2_LENS).abs() < 1e-14);
        assert!(((PI + chord.a) + 2.0 * chord.b - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn affine_sandwich_on_grid() {
        let (chord, tangent) = affine_v_bounds();
        for d in [0.25, 0.5, 1.0, 2.0, 4.0] {
            for i in 1..=100 {
                let r = d * (1.0 + i as f64 / 101.0);
                let v = v_union(d, r);
                assert!(chord.eval(d, r) < v, "chord at d={d} r={r}");
                assert!(v < tangent.eval(d, r), "tangent at d={d} r={r}");
            }
            for r in [d, 2.0 * d] {
                assert!((chord.eval(d, r) - v_union(d, r)).abs() < 1e-12 * d * d);
            }
        }
    }

    #[test]
    fn type1_pair_retention() {
        let params = p(2.0, 1.0, ProcessKind::MaternI);
        assert_eq!(pair_retention_type1(&params, 0.5), 0.0);
        for u in [2.0, 3.0, 10.0] {
            assert!((pair_retention_type1(&params, u) - (-4.0 * PI).exp()).abs() < 1e-20);
        }
        let none = p(2.0, 0.0, ProcessKind::MaternI);
        assert_eq!(pair_retention_type1(&none, 0.3), 1.0);
    }

    #[test]
    fn type2_pair_retention_beyond_two_delta() {
        for (lp, d) in [(0.5, 0.25), (2.0, 1.0), (4.0, 2.0)] {
            let params = p(lp, d, ProcessKind::MaternII);
            let a = PI * d * d;
            let want = ((-(-lp * a).exp_m1()) / (lp * a)).powi(2);
            let k = pair_retention_type2(&params, 2.5 * d).unwrap();
            assert!(((k - want) / want).abs() < 1e-13);
            let n = normalized_pair_type2(&params, 2.0 * d).unwrap();
            assert!((n - 1.0).abs() < 1e-13, "normalized = {n}");
        }
    }

    #[test]
    fn type2_pair_retention_small_parent_density() {
        let k = pair_retention_type2(&p(1e-12, 1.0, ProcessKind::MaternII), 1.0).unwrap();
        assert!((k - 1.0).abs() < 1e-10);
        // both branches agree at the seam
        let d = 1.0;
        let v = v_union(d, 1.3);
        let lp = TYPE2_SERIES_SEAM / v;
        let below = pair_retention_type2(&p(lp * (1.0 - 1e-9), d, ProcessKind::MaternII), 1.3).unwrap();
        let above = pair_retention_type2(&p(lp * (1.0 + 1e-9), d, ProcessKind::MaternII), 1.3).unwrap();
        assert!(((below - above) / above).abs() < 1e-10, "{below} vs {above}");
    }

    #[test]
    fn type2_pair_retention_below_asymptote() {
        let params = p(2.0, 1.0, ProcessKind::MaternII);
        let k = pair_retention_type2(&params, 1.0).unwrap();
        let asymptote = 2.0 / (4.0 * PI * C2_LENS);
        assert!(k < asymptote, "{k} vs {asymptote}");
        assert!(pair_retention_type2(&params, 0.99).is_err());
    }

    #[test]
    fn type2_normalized_pair_monotone() {
        let lps = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
        let ds = [0.25, 0.5, 1.0, 2.0];
        for ratio in [1.0, 1.2, 1.5, 1.8, 1.99] {
            for &d in &ds {
                let vals: Vec<f64> = lps
                    .iter()
                    .map(|&lp| normalized_pair_type2(&p(lp, d, ProcessKind::MaternII), ratio * d).unwrap())
                    .collect();
                assert!(vals.windows(2).all(|w| w[1] >= w[0]), "λ_p sweep at d={d} r/d={ratio}");
            }
            for &lp in &lps {
                let vals: Vec<f64> = ds
                    .iter()
                    .map(|&d| normalized_pair_type2(&p(lp, d, ProcessKind::MaternII), ratio * d).unwrap())
                    .collect();
                assert!(vals.windows(2).all(|w| w[1] >= w[0]), "δ sweep at λ_p={lp} r/d={ratio}");
            }
        }
    }

    #[test]
    fn k_function_examples() {
        let hole = p(1.0, 1.0, ProcessKind::PoissonHole);
        assert!((k_function(&hole, 2.0, &q()).unwrap() - 3.0 * PI).abs() < 1e-14);

        let t1 = p(2.0, 1.0, ProcessKind::MaternI);
        let factor = k_derivative(&t1, 1.0) / (2.0 * PI);
        assert!((factor - 11.666_708_951_365_741).abs() < 1e-11);
        assert!((factor.ln() - 2.456_739_397_217_513_7).abs() < 1e-13);

        let k50 = k_function(&t1, 50.0, &q()).unwrap() / (PI * 2500.0);
        assert!((0.99..=1.01).contains(&k50));
        // 40-digit quadrature reference
        let k2d = k_function(&t1, 2.0, &q()).unwrap();
        assert!(((k2d - 29.470_436_141_601_795) / k2d).abs() < 1e-9);
    }

    #[test]
    fn k_function_vanishes_inside_hard_core() {
        for kind in [ProcessKind::MaternI, ProcessKind::MaternII, ProcessKind::PoissonHole] {
            let params = p(2.0, 1.0, kind);
            for r in [0.0, 0.5, 0.999] {
                assert_eq!(k_function(&params, r, &q()).unwrap(), 0.0);
                assert_eq!(k_derivative(&params, r), 0.0);
            }
        }
    }

    #[test]
    fn k_function_approaches_poisson() {
        for kind in [ProcessKind::MaternI, ProcessKind::MaternII, ProcessKind::PoissonHole] {
            let params = p(1.0, 0.5, kind);
            let r = 1e3;
            let ratio = k_function(&params, r, &q()).unwrap() / (PI * r * r);
            assert!((ratio - 1.0).abs() < 1e-5, "{kind}: {ratio}");
        }
    }

    #[test]
    fn k_function_matches_brute_force_riemann_sum() {
        // 10⁶-panel midpoint rule of ∫_δ^{2δ} u exp(-λ_p V_δ(u)) du
        let (lp, d): (f64, f64) = (2.0, 1.0);
        let n = 1_000_000;
        let h = d / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let u = d + (i as f64 + 0.5) * h;
            s += u * (-lp * v_union(d, u)).exp();
        }
        let oracle = s * h;
        let got = integrate(|u| u * (-lp * v_union(d, u)).exp(), d, 2.0 * d, &q())
            .unwrap()
            .value;
        assert!(((got - oracle) / oracle).abs() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn k2delta_bound_examples() {
        let t1 = p(2.0, 1.0, ProcessKind::MaternI);
        let bound = k2delta_lower_bound(&t1).unwrap();
        assert!((bound - 19.347_269_914_458_622).abs() < 1e-11);
        assert!(bound < k_function(&t1, 2.0, &q()).unwrap());
        let tiny = p(2.0, 1e-6, ProcessKind::MaternI);
        assert!(k2delta_lower_bound(&tiny).unwrap() < 1e-10);
        assert!(k2delta_lower_bound(&p(2.0, 1.0, ProcessKind::MaternII)).is_err());
    }

    proptest! {
        #[test]
        fn union_area_nondecreasing(d in 0.01f64..5.0, a in 0.0f64..3.0, b in 0.0f64..3.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(v_union(d, lo * d) <= v_union(d, hi * d) + 1e-12 * d * d);
        }

        #[test]
        fn k2delta_bound_below_quadrature(lp in 0.1f64..4.0, d in 0.05f64..2.0) {
            let t1 = p(lp, d, ProcessKind::MaternI);
            let k = k_function(&t1, 2.0 * d, &q()).unwrap();
            prop_assert!(k2delta_lower_bound(&t1).unwrap() < k);
        }
    }
}
