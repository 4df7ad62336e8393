//! Convergence and near-best experiments.

use std::fmt::Write as _;

use super::functions::TestFunction;
use crate::density::{DensityField, DensityParams};
use crate::error::{Error, Result};
use crate::geometry::{
    dist, fill_distance, generate_centers, tensor_grid, CenterGenerator, CenterSet, Domain, PointSet,
};
use crate::interpolation::{fit, fit_smoothing, lagrange_basis};
use crate::kernel::SplineOrder;
use crate::stability::{default_grid, penalized_function};
use crate::{par, INTERPOLATION_TOL};

/// Errors at or below this level (relative to `max |f|`) count as exact.
pub const EXACT_TOL: f64 = 1e-9;
/// Errors at or below this multiple of `max |f|` are rounding noise and are
/// left out of order fits.
pub const NOISE_FLOOR: f64 = 1e-13;
/// Samples per axis of the local sup over `B(probe, 2 rho(probe))`.
pub const LOCAL_SAMPLES_1D: usize = 201;
pub const LOCAL_SAMPLES_2D: usize = 41;

#[derive(Clone, Debug)]
pub struct ConvergenceConfig {
    pub domain: Domain,
    /// One generator per level, strictly refining.
    pub levels: Vec<CenterGenerator>,
    pub seed: u64,
    pub function: TestFunction,
    pub order: SplineOrder,
    pub probes: Vec<Vec<f64>>,
    pub density: DensityParams,
    /// Points per axis of the global sup grid.
    pub sup_resolution: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub rho: f64,
    pub point_error: f64,
    /// Sup error over `B(probe, 2 rho(probe))` inside the domain.
    pub local_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    pub n: usize,
    pub max_rho: f64,
    pub fill_distance: f64,
    pub sup_error: f64,
    /// Largest interpolation residual at the centers.
    pub center_error: f64,
    pub probes: Vec<ProbeResult>,
}

/// Observed order of a log-log regression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    /// All errors at the exactness tolerance.
    Exact,
    Fitted(f64),
    /// Fewer than three levels with an error above the noise floor.
    Undetermined,
}

impl Order {
    pub fn value(&self) -> Option<f64> {
        match self {
            Order::Fitted(v) => Some(*v),
            _ => None,
        }
    }

    fn label(&self) -> String {
        match self {
            Order::Exact => "exact".into(),
            Order::Fitted(v) => format!("{v:.16e}"),
            Order::Undetermined => "undetermined".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub function: String,
    pub order: SplineOrder,
    pub probes: Vec<Vec<f64>>,
    pub levels: Vec<LevelResult>,
    /// Per probe: local sup error against `rho(probe)`.
    pub probe_orders: Vec<Order>,
    /// Global sup error against the largest `rho`.
    pub sup_order: Order,
}

/// Slope of `log y` against `log x` by least squares.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn fit_order(scale: &[f64], errors: &[f64], fscale: f64) -> Order {
    let fscale = fscale.max(f64::MIN_POSITIVE);
    if errors.iter().all(|e| *e <= EXACT_TOL * fscale) {
        return Order::Exact;
    }
    let floor = NOISE_FLOOR * fscale;
    let (x, y): (Vec<f64>, Vec<f64>) = scale
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > floor)
        .map(|(a, b)| (*a, *b))
        .unzip();
    if x.len() < 3 {
        return Order::Undetermined;
    }
    Order::Fitted(loglog_slope(&x, &y))
}

/// Sample points of `B(center, radius)` inside the domain.
pub fn local_samples(domain: &Domain, center: &[f64], radius: f64) -> PointSet {
    let d = center.len();
    let per = if d == 1 { LOCAL_SAMPLES_1D } else { LOCAL_SAMPLES_2D };
    let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
    let mut out = PointSet::new(d);
    for p in tensor_grid(&lo, &hi, per).iter() {
        if dist(p, center) <= radius && domain.contains(p) {
            out.push(p).expect("dimension");
        }
    }
    out
}

pub fn run_convergence(config: &ConvergenceConfig) -> Result<ConvergenceReport> {
    if config.levels.len() < 3 {
        return Err(Error::InvalidArgument(
            "a convergence study needs at least three levels".into(),
        ));
    }
    if config.function.dim() != config.domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: config.domain.dim(),
            got: config.function.dim(),
        });
    }
    let probes = PointSet::from_rows(config.domain.dim(), &config.probes)?;
    let sup_grid = config.domain.probe_grid(config.sup_resolution);
    let fvals_grid: Vec<f64> = sup_grid.iter().map(|x| config.function.eval(x)).collect();
    let fscale = fvals_grid.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut levels = Vec::with_capacity(config.levels.len());
    let mut last_n = 0;
    for (k, gen) in config.levels.iter().enumerate() {
        let centers = generate_centers(&config.domain, gen, config.seed)?;
        if centers.len() <= last_n {
            return Err(Error::InvalidArgument(format!(
                "level {k} does not refine the previous level"
            )));
        }
        last_n = centers.len();
        let level = run_level(config, &centers, &probes, &sup_grid, &fvals_grid).map_err(|e| annotate(e, k))?;
        let tolerance = INTERPOLATION_TOL * fscale.max(1.0);
        if level.center_error > tolerance {
            return Err(Error::Residual {
                residual: level.center_error,
                tolerance,
            });
        }
        levels.push(level);
    }
    let probe_orders = (0..probes.len())
        .map(|j| {
            let rho: Vec<f64> = levels.iter().map(|l| l.probes[j].rho).collect();
            let err: Vec<f64> = levels.iter().map(|l| l.probes[j].local_error).collect();
            fit_order(&rho, &err, fscale)
        })
        .collect();
    let rho: Vec<f64> = levels.iter().map(|l| l.max_rho).collect();
    let err: Vec<f64> = levels.iter().map(|l| l.sup_error).collect();
    Ok(ConvergenceReport {
        function: config.function.name.clone(),
        order: config.order,
        probes: config.probes.clone(),
        sup_order: fit_order(&rho, &err, fscale),
        probe_orders,
        levels,
    })
}

fn annotate(e: Error, level: usize) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("level {level}: {m}")),
        other => {
            log::error!("convergence level {level} failed");
            other
        }
    }
}

fn run_level(
    config: &ConvergenceConfig,
    centers: &CenterSet,
    probes: &PointSet,
    sup_grid: &PointSet,
    fvals_grid: &[f64],
) -> Result<LevelResult> {
    let f = &config.function;
    let data: Vec<f64> = centers.points().iter().map(|x| f.eval(x)).collect();
    let interp = fit(centers, &data, config.order)?;
    let center_error = centers
        .points()
        .iter()
        .zip(&data)
        .map(|(x, v)| (interp.evaluate(x) - v).abs())
        .fold(0.0, f64::max);
    let approx = interp.evaluate_batch(sup_grid);
    let sup_error = approx
        .iter()
        .zip(fvals_grid)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let field = DensityField::compute(centers, config.density, probes)?;
    let rho_probe = field.rho_at_probes().to_vec();
    let probe_results = par::map_indexed(probes.len(), |j| {
        let p = probes.point(j);
        let rho = rho_probe[j];
        let local = local_samples(&config.domain, p, 2.0 * rho);
        let local_error = local
            .iter()
            .map(|x| (interp.evaluate(x) - f.eval(x)).abs())
            .fold(0.0, f64::max);
        ProbeResult {
            rho,
            point_error: (interp.evaluate(p) - f.eval(p)).abs(),
            local_error,
        }
    });
    Ok(LevelResult {
        n: centers.len(),
        max_rho: field.rho().iter().cloned().fold(0.0, f64::max),
        fill_distance: fill_distance(centers, config.sup_resolution)?,
        sup_error,
        center_error,
        probes: probe_results,
    })
}

impl ConvergenceReport {
    /// One row per level; per-probe columns follow the global ones.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,max_rho,fill_distance,sup_error,center_error");
        for j in 0..self.probes.len() {
            write!(s, ",rho_p{j},point_error_p{j},local_error_p{j}").unwrap();
        }
        s.push('\n');
        for l in &self.levels {
            write!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                l.n, l.max_rho, l.fill_distance, l.sup_error, l.center_error
            )
            .unwrap();
            for p in &l.probes {
                write!(s, ",{:.16e},{:.16e},{:.16e}", p.rho, p.point_error, p.local_error).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        writeln!(s, "function = {}", self.function).unwrap();
        writeln!(s, "m = {} d = {}", self.order.m(), self.order.dim()).unwrap();
        writeln!(s, "levels = {}", self.levels.len()).unwrap();
        writeln!(s, "sup order (vs max rho) = {}", self.sup_order.label()).unwrap();
        for (p, o) in self.probes.iter().zip(&self.probe_orders) {
            let c: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(s, "probe ({}) local order (vs rho) = {}", c.join(", "), o.label()).unwrap();
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct NearBestConfig {
    pub centers: CenterSet,
    pub order: SplineOrder,
    pub function: TestFunction,
    pub sigma: f64,
    pub density: DensityParams,
    /// Ridge parameter of the comparison fit.
    pub ridge: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NearBestReport {
    /// `||(f - I f) / rho^sigma||` on the grid.
    pub interpolation_error: f64,
    /// `||(f - s) / rho^sigma||` for the ridge comparison `s`.
    pub comparison_error: f64,
    /// `None` when both errors vanish (0/0: exact).
    pub ratio: Option<f64>,
    /// Penalized Lebesgue constant over all centers on the grid.
    pub penalized_lebesgue: f64,
    /// `max_x sum |chi_xi(x)| (rho(xi) / rho(x))^sigma` on the grid; the
    /// factor in `||(f - I f)/rho^sigma|| <= (1 + B) ||(f - s)/rho^sigma||`.
    pub transfer_constant: f64,
    pub within_bound: bool,
}

/// Compares the interpolation error with the error of a ridge-regularized fit
/// on the same centers, in the `rho^sigma`-weighted sup norm on the default grid.
pub fn near_best_check(config: &NearBestConfig) -> Result<NearBestReport> {
    let centers = &config.centers;
    let f = &config.function;
    let data: Vec<f64> = centers.points().iter().map(|x| f.eval(x)).collect();
    let basis = lagrange_basis(centers, config.order)?;
    let interp = basis.interpolate(&data)?;
    let cmp = fit_smoothing(centers, &data, config.order, config.ridge)?;
    let (grid, _) = default_grid(centers)?;
    let field = DensityField::compute(centers, config.density, &grid)?;
    let rho = field.rho_on(&grid)?;
    let rho_c = field.rho_at_centers();
    let weighted = |g: usize, v: f64| v.abs() / rho[g].powf(config.sigma);
    let errs = par::map_indexed(grid.len(), |g| {
        let x = grid.point(g);
        let fx = f.eval(x);
        let chi = basis.values_at(x);
        let transfer: f64 = chi
            .iter()
            .zip(rho_c)
            .map(|(c, r)| c.abs() * (r / rho[g]).powf(config.sigma))
            .sum();
        (
            weighted(g, fx - interp.evaluate(x)),
            weighted(g, fx - cmp.evaluate(x)),
            transfer,
        )
    });
    let interpolation_error = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let comparison_error = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let transfer_constant = errs.iter().map(|e| e.2).fold(0.0, f64::max);
    let penalized_lebesgue = penalized_function(&basis, &rho, config.sigma, &grid, None)?
        .into_iter()
        .fold(0.0, f64::max);
    let fscale = data.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let ratio = if interpolation_error <= EXACT_TOL * fscale && comparison_error <= EXACT_TOL * fscale {
        None
    } else {
        Some(interpolation_error / comparison_error)
    };
    let within_bound = match ratio {
        None => true,
        Some(r) => r <= 1.0 + transfer_constant,
    };
    Ok(NearBestReport {
        interpolation_error,
        comparison_error,
        ratio,
        penalized_lebesgue,
        transfer_constant,
        within_bound,
    })
}

impl NearBestReport {
    pub fn to_csv(&self) -> String {
        format!(
            "interpolation_error,comparison_error,ratio,penalized_lebesgue,transfer_constant,within_bound\n{:.16e},{:.16e},{},{:.16e},{:.16e},{}\n",
            self.interpolation_error,
            self.comparison_error,
            self.ratio.map_or("0/0: exact".into(), |r| format!("{r:.16e}")),
            self.penalized_lebesgue,
            self.transfer_constant,
            u8::from(self.within_bound)
        )
    }
}
