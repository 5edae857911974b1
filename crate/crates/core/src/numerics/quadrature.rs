use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::compensated_sum;
use crate::error::{Error, Result};
use crate::model::QuadratureConfig;

// 21-point Kronrod extension of the 10-point Gauss-Legendre rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_089_340,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subdivisions_used: usize,
    /// False when the subdivision budget ran out before the tolerance was met.
    pub converged: bool,
}

impl QuadratureResult {
    /// The value, or a tolerance error naming `what` if convergence failed.
    pub fn into_value(self, what: &str, requested: f64) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Tolerance {
                what: what.to_string(),
                requested,
                achieved: self.abs_error_estimate / self.value.abs().max(f64::MIN_POSITIVE),
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::domain(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    Ok(Panel { a, b, value, error })
}

/// Adaptive Gauss-Kronrod integration of `f` over [a, b].
///
/// `b` may be `f64::INFINITY`; the half line is mapped to (0, 1] through
/// x = a + (1 - t)/t. Breakpoints from `cfg` that fall inside the interval
/// split the initial panels. The worst panel is bisected until the summed
/// error estimate meets `max(abs_tol, rel_tol·|value|)` or the panel budget
/// `max_subdivisions` is spent, in which case `converged` is false.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !a.is_finite() || b.is_nan() || b < a {
        return Err(Error::domain(format!("invalid integration range [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        });
    }
    if b.is_infinite() {
        let mapped = |t: f64| {
            let x = a + (1.0 - t) / t;
            f(x) / (t * t)
        };
        // breakpoints map to t = 1/(1 + x - a), reversed order
        let mut inner: Vec<f64> = cfg
            .breakpoints
            .iter()
            .filter(|&&x| x > a)
            .map(|&x| 1.0 / (1.0 + x - a))
            .collect();
        inner.sort_by(f64::total_cmp);
        return adaptive(&mapped, 0.0, 1.0, &inner, cfg);
    }
    let inner: Vec<f64> = cfg
        .breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    adaptive(&f, a, b, &inner, cfg)
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    inner: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let mut edges = Vec::with_capacity(inner.len() + 2);
    edges.push(a);
    edges.extend(inner.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.dedup();

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(gauss_kronrod(f, w[0], w[1])?);
    }
    let mut value = heap.iter().map(|p| p.value).sum::<f64>();
    let mut error = heap.iter().map(|p| p.error).sum::<f64>();
    let mut converged = false;
    loop {
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            converged = true;
            break;
        }
        if heap.len() >= cfg.max_subdivisions {
            break;
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let panels = heap.into_vec();
    Ok(QuadratureResult {
        value: compensated_sum(panels.iter().map(|p| p.value)),
        abs_error_estimate: compensated_sum(panels.iter().map(|p| p.error)),
        subdivisions_used: panels.len(),
        converged,
    })
}
