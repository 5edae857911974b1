use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::grid::NeighborGrid;
use super::SimulationConfig;
use crate::error::{Error, Result};
use crate::model::{intensity, HardCoreParams, PointPattern, ProcessKind};

/// Sampling region centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl Region {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Region::Disk { radius } => (0.0, radius),
            Region::Annulus { inner, outer } => (inner, outer),
        }
    }

    pub fn area(&self) -> f64 {
        let (a, b) = self.bounds();
        PI * (b * b - a * a)
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let n: f64 = Poisson::new(mean).expect("positive finite mean").sample(rng);
    n as usize
}

fn push_uniform_points<R: Rng + ?Sized>(
    lambda: f64,
    region: Region,
    marked: bool,
    points: &mut Vec<[f64; 2]>,
    marks: &mut Vec<f64>,
    rng: &mut R,
) {
    let (a, b) = region.bounds();
    if b <= a {
        return;
    }
    let (a2, b2) = (a * a, b * b);
    let square = 4.0 * b2;
    if region.area() >= 0.25 * square {
        // Poisson process on the bounding square, restricted to the region.
        let n = poisson_count(lambda * square, rng);
        points.reserve(n);
        for _ in 0..n {
            let x = b * (2.0 * rng.random::<f64>() - 1.0);
            let y = b * (2.0 * rng.random::<f64>() - 1.0);
            let r2 = x * x + y * y;
            if a2 <= r2 && r2 <= b2 {
                points.push([x, y]);
                if marked {
                    marks.push(rng.random::<f64>());
                }
            }
        }
    } else {
        let n = poisson_count(lambda * region.area(), rng);
        points.reserve(n);
        for _ in 0..n {
            let r = (a2 + rng.random::<f64>() * (b2 - a2)).sqrt().clamp(a, b);
            let (sin, cos) = (2.0 * PI * rng.random::<f64>()).sin_cos();
            points.push([r * cos, r * sin]);
            if marked {
                marks.push(rng.random::<f64>());
            }
        }
    }
}

/// Poisson process of intensity `lambda_p` in `region`, with uniform [0, 1)
/// marks when `marked` is set.
pub fn sample_parent<R: Rng + ?Sized>(lambda_p: f64, region: Region, marked: bool, rng: &mut R) -> PointPattern {
    let mut points = Vec::new();
    let mut marks = Vec::new();
    push_uniform_points(lambda_p, region, marked, &mut points, &mut marks, rng);
    let (_, outer) = region.bounds();
    PointPattern::from_parts_unchecked(points, marked.then_some(marks), outer)
}

/// Thinning result. `reliable[i]` is true when the neighborhood of radius δ
/// of point i lies inside the parent window, so its retention decision is
/// exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinnedPattern {
    pub pattern: PointPattern,
    pub reliable: Vec<bool>,
}

impl ThinnedPattern {
    /// Only the reliably thinned points, in the window of radius R - δ.
    pub fn into_reliable(self, delta: f64) -> PointPattern {
        let r = (self.pattern.window_radius() - delta).max(0.0);
        self.pattern.restrict(r)
    }
}

fn norm2(p: &[f64; 2]) -> f64 {
    p[0] * p[0] + p[1] * p[1]
}

fn dist2(p: &[f64; 2], q: &[f64; 2]) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    dx * dx + dy * dy
}

fn within(eval_radius: f64) -> impl Fn(&[f64; 2]) -> bool {
    let r2 = eval_radius * eval_radius;
    move |p| norm2(p) <= r2
}

/// Type I retention: no other point closer than δ. Points farther than
/// `eval_radius` from the origin are not evaluated and reported as removed.
pub(crate) fn retained_type1(points: &[[f64; 2]], delta: f64, extent: f64, eval_radius: f64) -> Vec<bool> {
    let inside = within(eval_radius);
    if delta == 0.0 {
        return points.iter().map(inside).collect();
    }
    let grid = NeighborGrid::new(points, None, extent, delta);
    let d2 = delta * delta;
    let mut crowded = vec![false; points.len()];
    grid.for_each_near_range(|s, range| {
        let p = grid.points[s];
        let mut hit = false;
        for (q, c) in grid.points[range.clone()].iter().zip(&mut crowded[range]) {
            let close = dist2(&p, q) < d2;
            hit |= close;
            *c |= close;
        }
        crowded[s] |= hit;
    });
    collect_kept(&grid, &crowded, inside)
}

/// Type II retention: every point closer than δ carries a larger mark.
/// Equal marks are ordered by index.
pub(crate) fn retained_type2(
    points: &[[f64; 2]],
    marks: &[f64],
    delta: f64,
    extent: f64,
    eval_radius: f64,
) -> Vec<bool> {
    let inside = within(eval_radius);
    if delta == 0.0 {
        return points.iter().map(inside).collect();
    }
    let grid = NeighborGrid::new(points, Some(marks), extent, delta);
    let d2 = delta * delta;
    let mut beaten = vec![false; points.len()];
    grid.for_each_near_range(|s, range| {
        let (p, m, i) = (grid.points[s], grid.marks[s], grid.index[s]);
        let mut lost = false;
        let others = grid.points[range.clone()]
            .iter()
            .zip(&grid.marks[range.clone()])
            .zip(&grid.index[range.clone()])
            .zip(&mut beaten[range]);
        for (((q, &mt), &it), b) in others {
            let close = dist2(&p, q) < d2;
            let s_loses = (mt < m) | ((mt == m) & (it < i));
            lost |= close & s_loses;
            *b |= close & !s_loses;
        }
        beaten[s] |= lost;
    });
    collect_kept(&grid, &beaten, inside)
}

fn collect_kept(grid: &NeighborGrid, removed: &[bool], inside: impl Fn(&[f64; 2]) -> bool) -> Vec<bool> {
    let mut keep = vec![false; removed.len()];
    for (s, p) in grid.points.iter().enumerate() {
        keep[grid.index[s] as usize] = !removed[s] && inside(p);
    }
    keep
}

fn select(points: &[[f64; 2]], marks: Option<&[f64]>, keep: &[bool], window: f64) -> PointPattern {
    let idx: Vec<usize> = (0..points.len()).filter(|&i| keep[i]).collect();
    PointPattern::from_parts_unchecked(
        idx.iter().map(|&i| points[i]).collect(),
        marks.map(|m| idx.iter().map(|&i| m[i]).collect()),
        window,
    )
}

fn thinned(parent: &PointPattern, keep: &[bool], delta: f64) -> ThinnedPattern {
    let window = parent.window_radius();
    let pattern = select(parent.points(), parent.marks(), keep, window);
    let reliable = pattern.points().iter().map(within(window - delta)).collect();
    ThinnedPattern { pattern, reliable }
}

/// Matérn type I thinning: a point is kept iff no other parent point lies
/// closer than δ.
pub fn thin_type1(parent: &PointPattern, delta: f64) -> Result<ThinnedPattern> {
    if !(delta >= 0.0) {
        return Err(Error::domain(format!("hard-core distance must be nonnegative, got {delta}")));
    }
    let r = parent.window_radius();
    let keep = retained_type1(parent.points(), delta, r, f64::INFINITY);
    Ok(thinned(parent, &keep, delta))
}

/// Matérn type II thinning: a point is kept iff every parent point closer
/// than δ has a larger mark. Marks must be present and distinct.
pub fn thin_type2(parent: &PointPattern, delta: f64) -> Result<ThinnedPattern> {
    if !(delta >= 0.0) {
        return Err(Error::domain(format!("hard-core distance must be nonnegative, got {delta}")));
    }
    let marks = parent
        .marks()
        .ok_or_else(|| Error::Input("type II thinning needs marks".into()))?;
    let mut sorted = marks.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Input("type II thinning needs distinct marks".into()));
    }
    let r = parent.window_radius();
    let keep = retained_type2(parent.points(), marks, delta, r, f64::INFINITY);
    Ok(thinned(parent, &keep, delta))
}

/// One realization of the process in `params` on the disk of radius
/// `cfg.window_radius`, thinned from a parent on the same disk.
pub fn sample_stationary<R: Rng + ?Sized>(
    params: &HardCoreParams,
    cfg: &SimulationConfig,
    rng: &mut R,
) -> Result<ThinnedPattern> {
    let region = Region::Disk { radius: cfg.window_radius };
    let d = params.delta();
    match params.kind() {
        ProcessKind::PoissonHole => {
            let parent = sample_parent(params.lambda_p(), region, false, rng);
            let n = parent.len();
            Ok(thinned(&parent, &vec![true; n], 0.0))
        }
        ProcessKind::MaternI => thin_type1(&sample_parent(params.lambda_p(), region, false, rng), d),
        ProcessKind::MaternII => {
            let parent = sample_parent(params.lambda_p(), region, true, rng);
            let keep = retained_type2(parent.points(), parent.marks().expect("marked"), d, cfg.window_radius, f64::INFINITY);
            Ok(thinned(&parent, &keep, d))
        }
    }
}

/// Palm sample of type I around a retained point at the origin (the origin
/// itself is not part of the output).
///
/// Given a retained origin, the parent has no point in b(o, δ) and is Poisson
/// elsewhere, so the parent is drawn on the annulus δ ≤ r ≤ R + guard and
/// thinned; retained points with r ≤ R are returned.
pub fn sample_palm_type1<R: Rng + ?Sized>(
    params: &HardCoreParams,
    cfg: &SimulationConfig,
    rng: &mut R,
) -> PointPattern {
    let d = params.delta();
    let outer = cfg.window_radius + cfg.guard;
    let mut points = Vec::new();
    push_uniform_points(
        params.lambda_p(),
        Region::Annulus { inner: d, outer },
        false,
        &mut points,
        &mut Vec::new(),
        rng,
    );
    let keep = retained_type1(&points, d, outer, cfg.window_radius);
    select(&points, None, &keep, cfg.window_radius)
}

/// Palm sample of type II plus the number of proposals it took.
#[derive(Debug, Clone, PartialEq)]
pub struct PalmSample {
    pub pattern: PointPattern,
    /// Proposals drawn before one was accepted (≥ 1).
    pub attempts: u64,
}

/// Type II proposals are abandoned after this many rejections in a row.
pub const MAX_TYPE2_ATTEMPTS: u64 = 100_000_000;

/// Expected acceptance rate below which type II Palm sampling refuses to run.
pub const MIN_TYPE2_ACCEPTANCE: f64 = 1e-6;

/// Palm sample of type II by rejection.
///
/// The origin gets a uniform mark t. Parent points inside b(o, δ) are
/// proposed until none has a mark below t (the origin is then retained);
/// the expected acceptance rate is λ/λ_p. The parent on δ < r ≤ R + guard
/// is independent of the proposal and drawn once. Thinning runs with the
/// origin as a competitor and the retained non-origin points with r ≤ R are
/// returned.
pub fn sample_palm_type2<R: Rng + ?Sized>(
    params: &HardCoreParams,
    cfg: &SimulationConfig,
    rng: &mut R,
) -> Result<PalmSample> {
    let d = params.delta();
    let expected = intensity(&params.with_kind(ProcessKind::MaternII)) / params.lambda_p();
    if expected < MIN_TYPE2_ACCEPTANCE {
        return Err(Error::Simulation(format!(
            "type II Palm acceptance rate {expected:.3e} is below {MIN_TYPE2_ACCEPTANCE:e}"
        )));
    }
    let mut points = vec![[0.0, 0.0]];
    let mut marks = vec![0.0];
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        if attempts > MAX_TYPE2_ATTEMPTS {
            return Err(Error::Simulation(format!(
                "no type II Palm proposal accepted in {MAX_TYPE2_ATTEMPTS} attempts"
            )));
        }
        points.truncate(1);
        marks.truncate(1);
        let t: f64 = rng.random();
        marks[0] = t;
        push_uniform_points(params.lambda_p(), Region::Disk { radius: d }, true, &mut points, &mut marks, rng);
        if marks[1..].iter().all(|&m| m > t) {
            break;
        }
    }
    let outer = cfg.window_radius + cfg.guard;
    push_uniform_points(
        params.lambda_p(),
        Region::Annulus { inner: d, outer },
        true,
        &mut points,
        &mut marks,
        rng,
    );
    let mut keep = retained_type2(&points, &marks, d, outer, cfg.window_radius);
    keep[0] = false;
    Ok(PalmSample {
        pattern: select(&points, Some(&marks), &keep, cfg.window_radius),
        attempts,
    })
}

/// Palm sample of the Poisson reference: intensity λ_p on δ ≤ r ≤ R.
pub fn sample_palm_poisson_hole<R: Rng + ?Sized>(
    params: &HardCoreParams,
    cfg: &SimulationConfig,
    rng: &mut R,
) -> PointPattern {
    sample_parent(
        params.lambda_p(),
        Region::Annulus {
            inner: params.delta(),
            outer: cfg.window_radius,
        },
        false,
        rng,
    )
}

/// Palm sample for any process kind.
pub fn sample_palm<R: Rng + ?Sized>(
    params: &HardCoreParams,
    cfg: &SimulationConfig,
    rng: &mut R,
) -> Result<PalmSample> {
    match params.kind() {
        ProcessKind::MaternI => Ok(PalmSample {
            pattern: sample_palm_type1(params, cfg, rng),
            attempts: 1,
        }),
        ProcessKind::MaternII => sample_palm_type2(params, cfg, rng),
        ProcessKind::PoissonHole => Ok(PalmSample {
            pattern: sample_palm_poisson_hole(params, cfg, rng),
            attempts: 1,
        }),
    }
}
