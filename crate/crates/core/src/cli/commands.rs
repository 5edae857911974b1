use crate::analytic::{k_derivative, k_function, lens_overlap, v_union};
use crate::error::{Error, Result};
use crate::interference::{
    eir, eir_from_split, eir_type1_approximation, eir_type2_bound, interference_outside_2delta,
    mean_interference_poisson_hole, mean_interference_quadrature, mean_interference_split,
    near_field_bounds, nu, to_db, type1_growth_exponent, EirMethod,
};
use crate::model::{intensity, HardCoreParams, PathLossModel, ProcessKind};
use crate::simulate::{
    default_window_radius, estimate_k_function, estimate_mean_interference, palm_ensemble,
    replicate_rng, sample_palm, sample_stationary, IntensityEstimate, SimulationConfig,
};

use super::table::{Cell, Table};
use super::{
    BoundsArgs, Command, EirArgs, EirMethodArg, Figure1Args, GridArgs, InterferenceArgs, KfunArgs,
    ModelArgs, MonteCarloArgs, PathLossArgs, SampleArgs, VunionArgs,
};

pub(crate) fn execute(command: &Command) -> Result<Table> {
    match command {
        Command::Intensity(a) => cmd_intensity(a),
        Command::Vunion(a) => cmd_vunion(a),
        Command::Kfun(a) => cmd_kfun(a),
        Command::Interference(a) => cmd_interference(a),
        Command::Eir(a) => cmd_eir(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Figure1(a) => cmd_figure1(a),
        Command::Replay(_) => Err(Error::Input("replay cannot be nested".into())),
    }
}

fn params(m: &ModelArgs) -> Result<HardCoreParams> {
    HardCoreParams::new(m.lambda_p, m.delta, m.process.into())
}

fn pathloss(p: &PathLossArgs, params: &HardCoreParams) -> Result<PathLossModel> {
    let model = PathLossModel::power_law(p.alpha, p.r0)?;
    model.check_compatible(params)?;
    Ok(model)
}

impl GridArgs {
    fn resolve(&self, default_min: f64, default_max: f64) -> Result<Vec<f64>> {
        if !self.radii.is_empty() {
            if let Some(r) = self.radii.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
                return Err(Error::domain(format!("radii must be finite and nonnegative, got {r}")));
            }
            return Ok(self.radii.clone());
        }
        let lo = self.r_min.unwrap_or(default_min);
        let hi = self.r_max.unwrap_or(default_max);
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return Err(Error::domain(format!("radius grid needs 0 <= r-min <= r-max, got [{lo}, {hi}]")));
        }
        linspace(lo, hi, self.steps)
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    match steps {
        0 => Err(Error::domain("a grid needs at least one point")),
        1 => Ok(vec![lo]),
        n => Ok((0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect()),
    }
}

fn sim_config(mc: &MonteCarloArgs, params: &HardCoreParams, replicates: usize) -> Result<SimulationConfig> {
    let mut cfg = SimulationConfig::for_params(params)
        .with_replicates(replicates)
        .with_seed(mc.seed)
        .with_fading(mc.fading()?)
        .with_tail_policy(mc.tail.into());
    if let Some(r) = mc.window_radius {
        cfg.window_radius = r;
    }
    Ok(cfg)
}

fn cmd_intensity(a: &ModelArgs) -> Result<Table> {
    let p = params(a)?;
    let mut t = Table::new(&["process", "lambda_p", "delta", "intensity"]);
    t.push(vec![p.kind().to_string().into(), p.lambda_p().into(), p.delta().into(), intensity(&p).into()]);
    Ok(t)
}

fn cmd_vunion(a: &VunionArgs) -> Result<Table> {
    if !(a.delta.is_finite() && a.delta >= 0.0) {
        return Err(Error::domain(format!("delta must be finite and nonnegative, got {}", a.delta)));
    }
    let mut t = Table::new(&["u", "v_union", "lens_overlap"]);
    for u in a.grid.resolve(0.0, 2.0 * a.delta)? {
        t.push(vec![u.into(), v_union(a.delta, u).into(), lens_overlap(a.delta, u).into()]);
    }
    Ok(t)
}

fn cmd_kfun(a: &KfunArgs) -> Result<Table> {
    let p = params(&a.model)?;
    let radii = a.grid.resolve(0.0, 3.0 * p.delta().max(1.0 / p.lambda_p().sqrt()))?;
    let quad = a.quad.config()?;
    let empirical = match a.mc.replicates {
        None => None,
        Some(n) => {
            let r_max = radii.iter().copied().fold(0.0, f64::max);
            let mut cfg = sim_config(&a.mc, &p, n)?;
            if a.mc.window_radius.is_none() {
                cfg.window_radius = r_max.max(2.0 * p.delta() + cfg.guard);
            }
            let ensemble = palm_ensemble(&p, &cfg)?;
            Some(estimate_k_function(&ensemble, &radii, &IntensityEstimate::exact(intensity(&p)))?)
        }
    };
    let mut columns = vec!["r", "k", "k_derivative"];
    if empirical.is_some() {
        columns.extend(["k_mc", "k_mc_std_error"]);
    }
    let mut t = Table::new(&columns);
    for (i, &r) in radii.iter().enumerate() {
        let mut row: Vec<Cell> = vec![r.into(), k_function(&p, r, &quad)?.into(), k_derivative(&p, r).into()];
        if let Some(est) = &empirical {
            row.push(est[i].k.into());
            row.push(est[i].std_error.into());
        }
        t.push(row);
    }
    Ok(t)
}

const ESTIMATE_COLUMNS: [&str; 7] = ["method", "mean", "std_error", "ci_low", "ci_high", "replicates", "tail_correction"];

fn cmd_interference(a: &InterferenceArgs) -> Result<Table> {
    let p = params(&a.model)?;
    let pl = pathloss(&a.pathloss, &p)?;
    let exact = match p.kind() {
        ProcessKind::PoissonHole => mean_interference_poisson_hole(&p, &pl)?,
        _ => mean_interference_quadrature(&p, &pl, &a.quad.config()?)?,
    };
    let mut t = Table::new(&ESTIMATE_COLUMNS);
    t.push(vec!["quadrature".into(), exact.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
    if let Some(n) = a.mc.replicates {
        let est = estimate_mean_interference(&p, &pl, &sim_config(&a.mc, &p, n)?)?;
        t.push(vec![
            "monte_carlo".into(),
            est.mean.into(),
            est.std_error.into(),
            est.ci_low.into(),
            est.ci_high.into(),
            est.replicates.into(),
            est.tail_correction.into(),
        ]);
    }
    Ok(t)
}

fn cmd_eir(a: &EirArgs) -> Result<Table> {
    let p = params(&a.model)?;
    let pl = pathloss(&a.pathloss, &p)?;
    let method = match a.method {
        EirMethodArg::Quadrature => EirMethod::Quadrature,
        EirMethodArg::UpperBound => EirMethod::UpperBound,
        EirMethodArg::Approximation => EirMethod::Approximation,
    };
    let report = eir(&p, &pl, method, &a.quad.config()?)?;
    let mut t = Table::new(&["process", "method", "mean_hardcore", "mean_poisson_hole", "eir_linear", "eir_db"]);
    t.push(vec![
        p.kind().to_string().into(),
        report.method.to_string().into(),
        report.mean_hardcore.into(),
        report.mean_poisson_hole.into(),
        report.eir_linear.into(),
        report.eir_db.into(),
    ]);
    Ok(t)
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Table> {
    let mut t = Table::new(&["quantity", "value", "db"]);
    let ratio_row = |name: &str, v: f64| vec![name.into(), v.into(), to_db(v).into()];
    let plain_row = |name: &str, v: f64| vec![name.into(), v.into(), Cell::Empty];
    if !a.type2 {
        let p = HardCoreParams::new(a.lambda_p, a.delta, ProcessKind::MaternI)?;
        let pl = pathloss(&a.pathloss, &p)?;
        if p.delta() == 0.0 {
            return Err(Error::domain("the near-field bounds need delta > 0"));
        }
        let quad = a.quad.config()?;
        let (lower, upper) = near_field_bounds(&p, &pl, &quad)?;
        let split = mean_interference_split(&p, &pl, &quad)?;
        let far = interference_outside_2delta(&p, &pl)?;
        let alpha = a.pathloss.alpha;
        t.push(plain_row("near_lower", lower));
        t.push(plain_row("near_quadrature", split.near));
        t.push(plain_row("near_upper", upper));
        t.push(plain_row("far", far));
        t.push(ratio_row("eir_lower", eir_from_split(lower, far, alpha)));
        t.push(ratio_row("eir_quadrature", eir_from_split(split.near, far, alpha)));
        t.push(ratio_row("eir_upper", eir_from_split(upper, far, alpha)));
        t.push(ratio_row("eir_approximation", eir_type1_approximation(&p, alpha)?.report.eir_linear));
        t.push(plain_row("growth_exponent", type1_growth_exponent()));
    }
    t.push(ratio_row("nu", nu()));
    t.push(ratio_row("type2_bound", eir_type2_bound(Some(a.pathloss.alpha))?));
    Ok(t)
}

fn cmd_sample(a: &SampleArgs) -> Result<Table> {
    let p = params(&a.model)?;
    let window = a.window_radius.unwrap_or_else(|| default_window_radius(&p));
    let mut rng = replicate_rng(a.seed, 0);
    let pattern = if a.palm {
        let cfg = SimulationConfig::for_params(&p).with_window_radius(window).with_seed(a.seed);
        cfg.validate(&p)?;
        sample_palm(&p, &cfg, &mut rng)?.pattern
    } else {
        if !(window.is_finite() && window > 0.0) {
            return Err(Error::Config(format!("window radius must be positive, got {window}")));
        }
        // Thin on a disk one hard-core distance larger so that every listed
        // point has its full neighborhood.
        let padded = SimulationConfig::for_params(&p).with_window_radius(window + p.delta());
        sample_stationary(&p, &padded, &mut rng)?.into_reliable(p.delta())
    };
    let mut t = Table::new(&["x", "y", "mark"]);
    let marks = pattern.marks();
    for (i, q) in pattern.points().iter().enumerate() {
        t.push(vec![q[0].into(), q[1].into(), marks.map(|m| m[i]).into()]);
    }
    Ok(t)
}

fn cmd_figure1(a: &Figure1Args) -> Result<Table> {
    if !(a.delta_min > 0.0 && a.delta_min <= a.delta_max && a.delta_max.is_finite()) {
        return Err(Error::domain(format!(
            "figure1 needs 0 < delta-min <= delta-max, got [{}, {}]",
            a.delta_min, a.delta_max
        )));
    }
    let quad = a.quad.config()?;
    let type2_factor = eir_type2_bound(Some(a.pathloss.alpha))?;
    let mut t = Table::new(&["delta", "poisson_hole", "matern2_upper_bound", "matern1_lower", "matern1_upper"]);
    for delta in linspace(a.delta_min, a.delta_max, a.steps)? {
        let p1 = HardCoreParams::new(a.lambda_p, delta, ProcessKind::MaternI)?;
        let pl = pathloss(&a.pathloss, &p1)?;
        let lambda1 = intensity(&p1);
        let poisson = mean_interference_poisson_hole(&p1, &pl)? / lambda1;
        let (lower, upper) = near_field_bounds(&p1, &pl, &quad)?;
        let far = interference_outside_2delta(&p1, &pl)?;
        t.push(vec![
            delta.into(),
            poisson.into(),
            (type2_factor * poisson).into(),
            ((lower + far) / lambda1).into(),
            ((upper + far) / lambda1).into(),
        ]);
    }
    Ok(t)
}
