//! Domain types shared by the analytic, quadrature and simulation layers.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which point process a parameter set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    /// Every parent point with a neighbor closer than δ is removed.
    MaternI,
    /// A parent point is removed if a neighbor closer than δ carries a smaller mark.
    MaternII,
    /// Poisson process of constant intensity seen from a typical point with
    /// an empty disk of radius δ around it.
    PoissonHole,
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessKind::MaternI => "matern1",
            ProcessKind::MaternII => "matern2",
            ProcessKind::PoissonHole => "poisson",
        })
    }
}

/// Parent intensity λ_p, hard-core distance δ and process kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardCoreParams {
    lambda_p: f64,
    delta: f64,
    kind: ProcessKind,
}

impl HardCoreParams {
    pub fn new(lambda_p: f64, delta: f64, kind: ProcessKind) -> Result<Self> {
        if !(lambda_p.is_finite() && lambda_p > 0.0) {
            return Err(Error::domain(format!(
                "parent intensity must be positive and finite, got {lambda_p}"
            )));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::domain(format!(
                "hard-core distance must be nonnegative and finite, got {delta}"
            )));
        }
        Ok(Self {
            lambda_p,
            delta,
            kind,
        })
    }

    pub fn lambda_p(&self) -> f64 {
        self.lambda_p
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    /// Same λ_p and δ, different process.
    pub fn with_kind(&self, kind: ProcessKind) -> Self {
        Self { kind, ..*self }
    }

    /// Area of the exclusion disk, πδ².
    pub fn disk_area(&self) -> f64 {
        PI * self.delta * self.delta
    }

    /// Intensity of the retained process.
    pub fn intensity(&self) -> f64 {
        intensity(self)
    }
}

/// Intensity λ of the process described by `params`.
///
/// Type II uses `exp_m1` so that λ_p·π·δ² near zero keeps full precision; at
/// δ = 0 both Matérn types reduce to the parent intensity.
pub fn intensity(params: &HardCoreParams) -> f64 {
    let lp = params.lambda_p;
    let area = params.disk_area();
    match params.kind {
        ProcessKind::PoissonHole => lp,
        ProcessKind::MaternI => lp * (-lp * area).exp(),
        ProcessKind::MaternII => {
            if area == 0.0 {
                lp
            } else {
                -(-lp * area).exp_m1() / area
            }
        }
    }
}

/// Radially symmetric path loss g(r).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PathLossShape {
    /// g(r) = max(r0, r)^(-alpha).
    PowerLaw { alpha: f64, r0: f64 },
    /// Piecewise-linear table. Below the first radius g is held constant;
    /// beyond the last radius it decays as a power law fitted to the last two
    /// entries.
    Tabulated { radii: Vec<f64>, gains: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    shape: PathLossShape,
}

impl PathLossModel {
    pub fn power_law(alpha: f64, r0: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(Error::domain(format!(
                "path loss exponent must exceed 2 for integrable path loss, got {alpha}"
            )));
        }
        if !(r0.is_finite() && r0 >= 0.0) {
            return Err(Error::domain(format!(
                "inner cutoff r0 must be nonnegative, got {r0}"
            )));
        }
        Ok(Self {
            shape: PathLossShape::PowerLaw { alpha, r0 },
        })
    }

    /// Builds a tabulated path loss from `(r, g(r))` pairs.
    ///
    /// Radii must be strictly increasing and nonnegative, gains nonnegative and
    /// nonincreasing, and the power-law decay fitted to the last two entries
    /// must be steeper than r^-2 (or the last gain zero) so that g is
    /// integrable over the plane.
    pub fn tabulated(table: &[(f64, f64)]) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::domain("tabulated path loss needs at least two entries"));
        }
        for &(r, g) in table {
            if !(r.is_finite() && r >= 0.0 && g.is_finite() && g >= 0.0) {
                return Err(Error::domain(format!("invalid path loss entry ({r}, {g})")));
            }
        }
        for w in table.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::domain("path loss radii must be strictly increasing"));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::domain("path loss gains must be nonincreasing"));
            }
        }
        let model = Self {
            shape: PathLossShape::Tabulated {
                radii: table.iter().map(|p| p.0).collect(),
                gains: table.iter().map(|p| p.1).collect(),
            },
        };
        match model.tail_exponent() {
            Some(beta) if beta <= 2.0 => Err(Error::domain(format!(
                "tabulated path loss decays as r^-{beta:.3} beyond the table, not integrable"
            ))),
            _ => Ok(model),
        }
    }

    pub fn shape(&self) -> &PathLossShape {
        &self.shape
    }

    /// Power-law exponent, if this is a power law.
    pub fn alpha(&self) -> Option<f64> {
        match self.shape {
            PathLossShape::PowerLaw { alpha, .. } => Some(alpha),
            PathLossShape::Tabulated { .. } => None,
        }
    }

    /// `(alpha, r0)` when the pure power form r^-alpha holds on [δ, ∞).
    pub(crate) fn pure_power_beyond(&self, delta: f64) -> Option<f64> {
        match self.shape {
            PathLossShape::PowerLaw { alpha, r0 } if r0 <= delta => Some(alpha),
            _ => None,
        }
    }

    /// Rejects combinations outside the supported class: a power-law cutoff
    /// r0 beyond the hard-core distance. For δ = 0 the process has no hard
    /// core and any cutoff is allowed.
    pub fn check_compatible(&self, params: &HardCoreParams) -> Result<()> {
        if let PathLossShape::PowerLaw { r0, .. } = self.shape {
            if params.delta() > 0.0 && r0 > params.delta() {
                return Err(Error::domain(format!(
                    "path loss cutoff r0 = {r0} exceeds the hard-core distance {}",
                    params.delta()
                )));
            }
        }
        Ok(())
    }

    /// Decay exponent of the extrapolated tail for tabulated models.
    /// `None` for power laws and for tables ending in a zero gain.
    fn tail_exponent(&self) -> Option<f64> {
        match &self.shape {
            PathLossShape::PowerLaw { .. } => None,
            PathLossShape::Tabulated { radii, gains } => {
                let n = radii.len();
                let (r1, r2) = (radii[n - 2], radii[n - 1]);
                let (g1, g2) = (gains[n - 2], gains[n - 1]);
                if g2 == 0.0 {
                    None
                } else if r1 == 0.0 {
                    // cannot fit a power law through the origin
                    Some(0.0)
                } else {
                    Some((g1 / g2).ln() / (r2 / r1).ln())
                }
            }
        }
    }

    /// g(r) for r ≥ 0.
    pub fn eval(&self, r: f64) -> f64 {
        match &self.shape {
            PathLossShape::PowerLaw { alpha, r0 } => {
                let r = r.max(*r0);
                if alpha.fract() == 0.0 && *alpha <= 64.0 {
                    r.powi(-(*alpha as i32))
                } else {
                    r.powf(-alpha)
                }
            }
            PathLossShape::Tabulated { radii, gains } => {
                let n = radii.len();
                if r <= radii[0] {
                    return gains[0];
                }
                if r >= radii[n - 1] {
                    return match self.tail_exponent() {
                        None => 0.0,
                        Some(beta) => gains[n - 1] * (r / radii[n - 1]).powf(-beta),
                    };
                }
                let i = radii.partition_point(|&x| x <= r) - 1;
                let t = (r - radii[i]) / (radii[i + 1] - radii[i]);
                gains[i] + t * (gains[i + 1] - gains[i])
            }
        }
    }

    /// Radii in (a, b) where g is not smooth.
    pub fn kinks_in(&self, a: f64, b: f64) -> Vec<f64> {
        let inside = |x: &f64| *x > a && *x < b;
        match &self.shape {
            PathLossShape::PowerLaw { r0, .. } => {
                std::iter::once(*r0).filter(inside).collect()
            }
            PathLossShape::Tabulated { radii, .. } => {
                radii.iter().copied().filter(inside).collect()
            }
        }
    }

    /// ∫_a^b g(r) r dr, with `b` possibly infinite. Returns +∞ when the
    /// integral diverges (power law with r0 = 0 integrated from 0).
    pub fn radial_moment(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.shape {
            PathLossShape::PowerLaw { alpha, r0 } => {
                let mut total = 0.0;
                if a < *r0 {
                    let hi = b.min(*r0);
                    total += r0.powf(-alpha) * (hi * hi - a * a) / 2.0;
                }
                let lo = a.max(*r0);
                if b > lo {
                    let upper = if b.is_infinite() { 0.0 } else { b.powf(2.0 - alpha) };
                    total += (lo.powf(2.0 - alpha) - upper) / (alpha - 2.0);
                }
                total
            }
            PathLossShape::Tabulated { radii, gains } => {
                let n = radii.len();
                let mut total = 0.0;
                // constant head
                if a < radii[0] {
                    let hi = b.min(radii[0]);
                    total += gains[0] * (hi * hi - a * a) / 2.0;
                }
                // linear pieces, integrated exactly
                for i in 0..n - 1 {
                    let lo = a.max(radii[i]);
                    let hi = b.min(radii[i + 1]);
                    if hi <= lo {
                        continue;
                    }
                    let slope = (gains[i + 1] - gains[i]) / (radii[i + 1] - radii[i]);
                    let c = gains[i] - slope * radii[i];
                    total += c * (hi * hi - lo * lo) / 2.0 + slope * (hi.powi(3) - lo.powi(3)) / 3.0;
                }
                // extrapolated power-law tail
                let last = radii[n - 1];
                if b > last {
                    if let Some(beta) = self.tail_exponent() {
                        let lo = a.max(last);
                        let scale = gains[n - 1] * last.powf(beta);
                        let upper = if b.is_infinite() { 0.0 } else { b.powf(2.0 - beta) };
                        total += scale * (lo.powf(2.0 - beta) - upper) / (beta - 2.0);
                    }
                }
                total
            }
        }
    }
}

/// Power fading coefficient distribution. Every variant has unit mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FadingModel {
    #[default]
    None,
    UnitMeanExponential,
    UnitMeanGamma { shape: f64 },
}

impl FadingModel {
    pub fn gamma(shape: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::domain(format!("gamma fading shape must be positive, got {shape}")));
        }
        Ok(FadingModel::UnitMeanGamma { shape })
    }

    pub(crate) fn sampler(&self) -> FadingSampler {
        match *self {
            FadingModel::None => FadingSampler::Unit,
            FadingModel::UnitMeanExponential => FadingSampler::Exp,
            FadingModel::UnitMeanGamma { shape } => {
                FadingSampler::Gamma(Gamma::new(shape, 1.0 / shape).expect("validated shape"))
            }
        }
    }
}

pub(crate) enum FadingSampler {
    Unit,
    Exp,
    Gamma(Gamma<f64>),
}

impl FadingSampler {
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingSampler::Unit => 1.0,
            FadingSampler::Exp => Exp1.sample(rng),
            FadingSampler::Gamma(g) => g.sample(rng),
        }
    }
}

/// A finite planar point set observed in the disk of radius `window_radius`
/// centered at the origin, with optional marks in [0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    points: Vec<[f64; 2]>,
    marks: Option<Vec<f64>>,
    window_radius: f64,
}

impl PointPattern {
    pub fn new(points: Vec<[f64; 2]>, marks: Option<Vec<f64>>, window_radius: f64) -> Result<Self> {
        if !(window_radius.is_finite() && window_radius >= 0.0) {
            return Err(Error::Input(format!("invalid window radius {window_radius}")));
        }
        let slack = window_radius * (1.0 + 1e-12);
        if let Some(p) = points.iter().find(|p| p[0].hypot(p[1]) > slack) {
            return Err(Error::Input(format!(
                "point ({}, {}) lies outside the window of radius {window_radius}",
                p[0], p[1]
            )));
        }
        if let Some(m) = &marks {
            if m.len() != points.len() {
                return Err(Error::Input(format!(
                    "{} marks for {} points",
                    m.len(),
                    points.len()
                )));
            }
            if let Some(bad) = m.iter().find(|&&v| !(0.0..1.0).contains(&v)) {
                return Err(Error::Input(format!("mark {bad} outside [0, 1)")));
            }
        }
        Ok(Self {
            points,
            marks,
            window_radius,
        })
    }

    pub(crate) fn from_parts_unchecked(
        points: Vec<[f64; 2]>,
        marks: Option<Vec<f64>>,
        window_radius: f64,
    ) -> Self {
        Self {
            points,
            marks,
            window_radius,
        }
    }

    pub fn empty(window_radius: f64) -> Self {
        Self::from_parts_unchecked(Vec::new(), None, window_radius)
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn marks(&self) -> Option<&[f64]> {
        self.marks.as_deref()
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points at distance at most `r` from the origin.
    pub fn count_within(&self, r: f64) -> usize {
        self.points.iter().filter(|p| p[0].hypot(p[1]) <= r).count()
    }

    /// Sub-pattern of points at distance at most `radius` from the origin,
    /// observed in a window of that radius.
    pub fn restrict(&self, radius: f64) -> PointPattern {
        let radius = radius.min(self.window_radius);
        let keep: Vec<usize> = (0..self.points.len())
            .filter(|&i| self.points[i][0].hypot(self.points[i][1]) <= radius)
            .collect();
        PointPattern {
            points: keep.iter().map(|&i| self.points[i]).collect(),
            marks: self.marks.as_ref().map(|m| keep.iter().map(|&i| m[i]).collect()),
            window_radius: radius,
        }
    }

    /// Smallest distance between two points, `None` for fewer than two points.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        let n = self.points.len();
        if n < 2 {
            return None;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| self.points[i][0].total_cmp(&self.points[j][0]));
        let mut best = f64::INFINITY;
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[k + 1..] {
                let dx = self.points[j][0] - self.points[i][0];
                if dx >= best {
                    break;
                }
                best = best.min(dx.hypot(self.points[j][1] - self.points[i][1]));
            }
        }
        Some(best)
    }

    /// CSV export with header `x,y,mark`; the mark column is empty for
    /// unmarked patterns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,mark\n");
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&crate::format::sig(p[0]));
            out.push(',');
            out.push_str(&crate::format::sig(p[1]));
            out.push(',');
            if let Some(m) = &self.marks {
                out.push_str(&crate::format::sig(m[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Monte Carlo estimate of the mean Palm interference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// 95% confidence bounds.
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicates: usize,
    /// Analytic mean interference from beyond the window, already included in `mean`.
    pub tail_correction: f64,
}

impl InterferenceEstimate {
    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Tolerances and breakpoints for adaptive quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Radii where the integrand is not smooth, sorted ascending.
    pub breakpoints: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 500,
            breakpoints: Vec::new(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        if self.breakpoints.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("breakpoints must be sorted ascending".into()));
        }
        Ok(())
    }

    /// Copy of this configuration with extra breakpoints merged in.
    pub fn with_breakpoints(&self, extra: impl IntoIterator<Item = f64>) -> Self {
        let mut cfg = self.clone();
        cfg.breakpoints.extend(extra);
        cfg.breakpoints.sort_by(f64::total_cmp);
        cfg.breakpoints.dedup();
        cfg
    }
}
