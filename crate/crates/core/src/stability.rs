//! Lebesgue and penalized Lebesgue constants on evaluation grids, decay
//! envelope fits for Lagrange functions and refinement sweeps.

use std::fmt::Write as _;

use crate::density::{DensityField, DensityParams};
use crate::error::{Error, Result};
use crate::geometry::{dist, separation, Bounds, CenterSet, PointSet};
use crate::interpolation::{lagrange_basis, LagrangeBasis};
use crate::kernel::SplineOrder;
use crate::par;

/// Grid point cap in 2-D.
pub const MAX_GRID_POINTS: usize = 1_000_000;
/// Floor applied to `|chi|` before taking logarithms.
pub const DECAY_FLOOR: f64 = 1e-14;
/// Minimum number of far-field samples for a decay fit.
pub const MIN_DECAY_SAMPLES: usize = 8;

/// Description of an evaluation grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub spacing: f64,
    pub per_axis: Vec<usize>,
    /// Tensor points inside the domain.
    pub tensor_points: usize,
    /// Whether the centers were appended to the tensor points.
    pub includes_centers: bool,
}

impl GridSpec {
    pub fn describe(&self) -> String {
        let axes: Vec<String> = self.per_axis.iter().map(|n| n.to_string()).collect();
        format!(
            "tensor spacing {:.6e}, per-axis {}, {} tensor points{}",
            self.spacing,
            axes.join("x"),
            self.tensor_points,
            if self.includes_centers { " plus centers" } else { "" }
        )
    }
}

/// Default sup grid: spacing `min q / 4` in 1-D and `min q / 3` in 2-D (coarsened
/// to stay under [`MAX_GRID_POINTS`]), over the domain's bounding box and
/// restricted to the domain, followed by the centers themselves.
pub fn default_grid(centers: &CenterSet) -> Result<(PointSet, GridSpec)> {
    let q = separation(centers.points())?;
    let qmin = q.iter().cloned().fold(f64::INFINITY, f64::min);
    let d = centers.dim();
    let divisor = if d == 1 { 4.0 } else { 3.0 };
    grid_with_spacing(centers, qmin / divisor)
}

/// Uniform grid of (at most) the given spacing over the domain plus the centers.
pub fn grid_with_spacing(centers: &CenterSet, spacing: f64) -> Result<(PointSet, GridSpec)> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid spacing must be positive, got {spacing}"
        )));
    }
    let domain = centers.domain();
    let d = centers.dim();
    let (lo, hi) = match domain.bounds() {
        Bounds::Box { lo, hi } => (lo.clone(), hi.clone()),
        Bounds::Ball { center, radius } => (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect::<Vec<f64>>(),
        ),
    };
    let mut h = spacing;
    let per_axis = loop {
        let per: Vec<usize> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| ((b - a) / h).ceil() as usize + 1)
            .collect();
        if d == 1 || per.iter().product::<usize>() <= MAX_GRID_POINTS {
            break per;
        }
        h *= 1.1;
    };
    let mut grid = PointSet::new(d);
    let mut idx = vec![0usize; d];
    let mut p = vec![0.0; d];
    'outer: loop {
        for k in 0..d {
            let t = idx[k] as f64 / (per_axis[k] - 1) as f64;
            p[k] = if idx[k] + 1 == per_axis[k] {
                hi[k]
            } else {
                lo[k] + t * (hi[k] - lo[k])
            };
        }
        if domain.contains(&p) {
            grid.push(&p)?;
        }
        for k in 0..d {
            idx[k] += 1;
            if idx[k] < per_axis[k] {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    let tensor_points = grid.len();
    grid.extend(centers.points());
    let actual = lo
        .iter()
        .zip(&hi)
        .zip(&per_axis)
        .map(|((a, b), n)| (b - a) / (*n - 1) as f64)
        .fold(0.0, f64::max);
    Ok((
        grid,
        GridSpec {
            spacing: actual,
            per_axis,
            tensor_points,
            includes_centers: true,
        },
    ))
}

fn restricted(basis: &LagrangeBasis, restrict_to: Option<&[usize]>) -> Result<Vec<usize>> {
    match restrict_to {
        Some(ix) => {
            if let Some(&bad) = ix.iter().find(|&&i| i >= basis.len()) {
                return Err(Error::InvalidArgument(format!("center index {bad} out of range")));
            }
            Ok(ix.to_vec())
        }
        None => Ok((0..basis.len()).collect()),
    }
}

/// Penalized sums `sum_{xi} |chi_xi(x)| (1 + |x - xi| / rho(x))^sigma` at
/// every grid point. With `rho = None` or `sigma = 0` every factor is exactly 1.
fn penalized_sums(
    basis: &LagrangeBasis,
    grid: &PointSet,
    rho: Option<&[f64]>,
    sigma: f64,
    restrict: &[usize],
) -> Vec<f64> {
    let centers = basis.centers();
    par::map_indexed(grid.len(), |g| {
        let x = grid.point(g);
        let values = basis.values_at(x);
        crate::par::compensated_sum(restrict.iter().map(|&i| {
            let factor = match rho {
                Some(rho) if sigma != 0.0 => (1.0 + dist(x, centers.point(i)) / rho[g]).powf(sigma),
                _ => 1.0,
            };
            values[i].abs() * factor
        }))
    })
}

fn argmax(values: &[f64]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, &v) in values.iter().enumerate() {
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}

/// Lebesgue function `sum_{xi in restrict} |chi_xi(x)|` on the grid.
pub fn lebesgue_function(basis: &LagrangeBasis, grid: &PointSet, restrict_to: Option<&[usize]>) -> Result<Vec<f64>> {
    let r = restricted(basis, restrict_to)?;
    Ok(penalized_sums(basis, grid, None, 0.0, &r))
}

/// `(Lambda, argmax)`: the largest Lebesgue function value on the grid and the
/// first grid index attaining it.
pub fn lebesgue_constant(
    basis: &LagrangeBasis,
    grid: &PointSet,
    restrict_to: Option<&[usize]>,
) -> Result<(f64, usize)> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty evaluation grid".into()));
    }
    Ok(argmax(&lebesgue_function(basis, grid, restrict_to)?))
}

/// Penalized Lebesgue function with `rho` given at each grid point.
pub fn penalized_function(
    basis: &LagrangeBasis,
    rho: &[f64],
    sigma: f64,
    grid: &PointSet,
    restrict_to: Option<&[usize]>,
) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "penalty exponent must be nonnegative, got {sigma}"
        )));
    }
    if rho.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: rho.len(),
        });
    }
    let r = restricted(basis, restrict_to)?;
    Ok(penalized_sums(basis, grid, Some(rho), sigma, &r))
}

/// `(L_{sigma,rho}, argmax)` with `rho` taken from `field` at the grid points.
pub fn penalized_lebesgue(
    basis: &LagrangeBasis,
    field: &DensityField,
    sigma: f64,
    grid: &PointSet,
    restrict_to: Option<&[usize]>,
) -> Result<(f64, usize)> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty evaluation grid".into()));
    }
    let rho = field.rho_on(grid)?;
    Ok(argmax(&penalized_function(basis, &rho, sigma, grid, restrict_to)?))
}

/// Fitted envelope `|chi_xi(x)| <= C (1 + r/rho)^s exp(-lambda (min(r, r0)/rho)^eps)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub center: usize,
    pub rho: f64,
    pub c: f64,
    pub lambda: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    /// Fraction of samples above the envelope with `C` doubled.
    pub envelope_violation: f64,
    pub samples: usize,
    /// Set when fewer than [`MIN_DECAY_SAMPLES`] samples sit above the floor
    /// or the fitted rate is not positive.
    pub no_decay_resolved: bool,
}

/// Polynomial exponent `s = (1 - eps)(m - d/2)`.
pub fn decay_exponent(order: SplineOrder, epsilon: f64) -> f64 {
    (1.0 - epsilon) * (order.m() as f64 - order.dim() as f64 / 2.0)
}

/// Per-center envelope fits on grid samples with `|x - xi| >= rho(xi)`.
pub fn fit_decay(
    basis: &LagrangeBasis,
    field: &DensityField,
    epsilon: f64,
    r0: f64,
    grid: &PointSet,
    centers: Option<&[usize]>,
) -> Result<Vec<DecayFit>> {
    if !(epsilon > 0.0 && epsilon <= 1.0) || !(r0 > 0.0) {
        return Err(Error::InvalidArgument("decay fit needs 0 < eps <= 1 and r0 > 0".into()));
    }
    let which = restricted(basis, centers)?;
    let rho_c = field.rho_on(basis.centers())?;
    let s = decay_exponent(basis.order(), epsilon);
    // chi values are shared across centers: evaluate every grid point once
    let values: Vec<Vec<f64>> = par::map_indexed(grid.len(), |g| basis.values_at(grid.point(g)));
    let fits = par::map_indexed(which.len(), |k| {
        let i = which[k];
        let xi = basis.centers().point(i);
        let rho = rho_c[i];
        let mut samples = Vec::new();
        for (g, row) in values.iter().enumerate() {
            let r = dist(grid.point(g), xi);
            if r < rho {
                continue;
            }
            let chi = row[i].abs();
            let y = chi.max(DECAY_FLOOR).ln() - s * (r / rho).ln_1p();
            let z = -(r.min(r0) / rho).powf(epsilon);
            samples.push((z, y, chi > DECAY_FLOOR, chi, r));
        }
        fit_one(i, rho, s, epsilon, r0, &samples)
    });
    fits.into_iter().collect()
}

fn fit_one(
    center: usize,
    rho: f64,
    s: f64,
    epsilon: f64,
    r0: f64,
    samples: &[(f64, f64, bool, f64, f64)],
) -> Result<DecayFit> {
    let n = samples.len();
    if n < MIN_DECAY_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n,
            need: MIN_DECAY_SAMPLES,
        });
    }
    let nf = n as f64;
    let mz = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let szz: f64 = samples.iter().map(|s| (s.0 - mz).powi(2)).sum();
    let szy: f64 = samples.iter().map(|s| (s.0 - mz) * (s.1 - my)).sum();
    let lambda = if szz > 0.0 { szy / szz } else { 0.0 };
    let log_c = my - lambda * mz;
    let residual = (samples
        .iter()
        .map(|s| (s.1 - log_c - lambda * s.0).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    let c = log_c.exp();
    let violations = samples
        .iter()
        .filter(|&&(_, _, _, chi, r)| {
            let bound = 2.0 * c * (1.0 + r / rho).powf(s) * (-lambda * (r.min(r0) / rho).powf(epsilon)).exp();
            chi > bound
        })
        .count();
    let resolved = samples.iter().filter(|s| s.2).count();
    Ok(DecayFit {
        center,
        rho,
        c,
        lambda,
        residual,
        envelope_violation: violations as f64 / nf,
        samples: n,
        no_decay_resolved: resolved < MIN_DECAY_SAMPLES || !(lambda > 0.0),
    })
}

/// Ratios `|chi_index(x0 + (k + 1/2) h dir)| / |chi_index(x0 + (k - 1/2) h dir)|`
/// for each `k` in `offsets`, sampling midway between centers of a uniform
/// grid of spacing `h`.
pub fn spacing_decay_ratios(
    basis: &LagrangeBasis,
    index: usize,
    direction: &[f64],
    h: f64,
    offsets: &[usize],
) -> Vec<f64> {
    let x0 = basis.centers().point(index).to_vec();
    let at = |t: f64| -> f64 {
        let x: Vec<f64> = x0.iter().zip(direction).map(|(a, u)| a + t * h * u).collect();
        basis.value(index, &x).abs()
    };
    offsets
        .iter()
        .map(|&k| at(k as f64 + 0.5) / at(k as f64 - 0.5))
        .collect()
}

/// Summary of the stability of one center set.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub sigma: f64,
    pub grid: GridSpec,
    pub grid_points: PointSet,
    pub lebesgue: f64,
    pub lebesgue_argmax: Vec<f64>,
    pub penalized: f64,
    pub penalized_argmax: Vec<f64>,
    pub lebesgue_function: Vec<f64>,
    pub penalized_function: Vec<f64>,
    pub rho: Vec<f64>,
    pub epsilon: Option<f64>,
    /// `s = (1 - eps)(m - d/2)`.
    pub s: Option<f64>,
    /// `sigma + s`.
    pub sigma1: Option<f64>,
    pub r0: f64,
    pub decay: Vec<DecayFit>,
}

/// Options for [`stability_report`].
#[derive(Clone, Debug)]
pub struct StabilityOptions {
    pub sigma: f64,
    pub params: DensityParams,
    /// Decay fit exponent; defaults to the fitted slow-growth exponent.
    pub epsilon: Option<f64>,
    pub fit_decay: bool,
}

/// Builds the Lagrange basis, the default grid and the density field on it,
/// then the classical and penalized constants over `Xi_f` and optional decay fits.
pub fn stability_report(
    centers: &CenterSet,
    order: SplineOrder,
    options: &StabilityOptions,
) -> Result<StabilityReport> {
    let basis = lagrange_basis(centers, order)?;
    let (grid, spec) = default_grid(centers)?;
    let field = DensityField::compute(centers, options.params, &grid)?;
    let restrict = centers.support_indices();
    let lf = lebesgue_function(&basis, &grid, Some(&restrict))?;
    let rho = field.rho_on(&grid)?;
    let pf = penalized_function(&basis, &rho, options.sigma, &grid, Some(&restrict))?;
    let (lebesgue, li) = argmax(&lf);
    let (penalized, pi) = argmax(&pf);
    let epsilon = options.epsilon.or(field.diagnostics().epsilon);
    let s = epsilon.map(|e| decay_exponent(order, e));
    let r0 = centers.domain().r0();
    let decay = match (options.fit_decay, epsilon) {
        (true, Some(e)) => fit_decay(&basis, &field, e, r0, &grid, Some(&restrict))?,
        _ => Vec::new(),
    };
    Ok(StabilityReport {
        sigma: options.sigma,
        lebesgue_argmax: grid.point(li).to_vec(),
        penalized_argmax: grid.point(pi).to_vec(),
        grid: spec,
        grid_points: grid,
        lebesgue,
        penalized,
        lebesgue_function: lf,
        penalized_function: pf,
        rho,
        epsilon,
        s,
        sigma1: s.map(|s| options.sigma + s),
        r0,
        decay,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("none".into(), |x| format!("{x:.16e}"))
}

fn fmt_point(p: &[f64]) -> String {
    let v: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
    format!("({})", v.join(", "))
}

impl StabilityReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        writeln!(s, "sigma = {:.16e}", self.sigma).unwrap();
        writeln!(s, "grid = {}", self.grid.describe()).unwrap();
        writeln!(
            s,
            "lebesgue = {:.16e} at {}",
            self.lebesgue,
            fmt_point(&self.lebesgue_argmax)
        )
        .unwrap();
        writeln!(
            s,
            "penalized = {:.16e} at {}",
            self.penalized,
            fmt_point(&self.penalized_argmax)
        )
        .unwrap();
        writeln!(s, "epsilon = {}", fmt_opt(self.epsilon)).unwrap();
        writeln!(s, "s = {}", fmt_opt(self.s)).unwrap();
        writeln!(s, "sigma1 = {}", fmt_opt(self.sigma1)).unwrap();
        writeln!(s, "r0 = {:.16e}", self.r0).unwrap();
        if !self.decay.is_empty() {
            let unresolved = self.decay.iter().filter(|f| f.no_decay_resolved).count();
            writeln!(
                s,
                "decay fits = {} ({} without resolved decay)",
                self.decay.len(),
                unresolved
            )
            .unwrap();
        }
        s
    }

    /// One row per grid point: coordinates, Lebesgue function, penalized
    /// function and `rho`.
    pub fn grid_csv(&self) -> String {
        let d = self.grid_points.dim();
        let mut s = String::new();
        let names: Vec<String> = (0..d).map(|k| format!("x{k}")).collect();
        writeln!(s, "{},lebesgue,penalized,rho", names.join(",")).unwrap();
        for (i, p) in self.grid_points.iter().enumerate() {
            let c: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e}",
                c.join(","),
                self.lebesgue_function[i],
                self.penalized_function[i],
                self.rho[i]
            )
            .unwrap();
        }
        s
    }

    pub fn decay_csv(&self) -> String {
        decay_csv(&self.decay)
    }
}

pub fn decay_csv(fits: &[DecayFit]) -> String {
    let mut s = String::from("center,rho,C,lambda,residual,envelope_violation,samples,no_decay_resolved\n");
    for f in fits {
        writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            f.center,
            f.rho,
            f.c,
            f.lambda,
            f.residual,
            f.envelope_violation,
            f.samples,
            u8::from(f.no_decay_resolved)
        )
        .unwrap();
    }
    s
}

/// One level of a refinement sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub lebesgue: f64,
    pub penalized: f64,
    pub c0: f64,
    pub epsilon_star: Option<f64>,
    pub max_rho: f64,
    /// Slow growth at the requested exponent on all sampled pairs.
    pub slow_growth: Option<bool>,
}

/// Classical and penalized constants with density diagnostics for each member
/// of a family of center sets.
pub fn refinement_sweep(
    family: &[CenterSet],
    order: SplineOrder,
    sigma: f64,
    params: DensityParams,
    epsilon: Option<f64>,
) -> Result<Vec<SweepRow>> {
    family
        .iter()
        .map(|centers| {
            let basis = lagrange_basis(centers, order)?;
            let (grid, _) = default_grid(centers)?;
            let field = DensityField::compute(centers, params, &grid)?;
            let restrict = centers.support_indices();
            let (lebesgue, _) = lebesgue_constant(&basis, &grid, Some(&restrict))?;
            let (penalized, _) = penalized_lebesgue(&basis, &field, sigma, &grid, Some(&restrict))?;
            let dg = field.diagnostics();
            Ok(SweepRow {
                n: centers.len(),
                lebesgue,
                penalized,
                c0: dg.c0,
                epsilon_star: dg.epsilon,
                max_rho: field.rho().iter().cloned().fold(0.0, f64::max),
                slow_growth: epsilon.map(|e| field.check_slow_growth(e).passed()),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("n,lebesgue,penalized,c0,epsilon_star,max_rho,slow_growth\n");
    for r in rows {
        writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{},{:.16e},{}",
            r.n,
            r.lebesgue,
            r.penalized,
            r.c0,
            r.epsilon_star.map_or("none".into(), |e| format!("{e:.16e}")),
            r.max_rho,
            r.slow_growth.map_or("none", |b| if b { "pass" } else { "fail" })
        )
        .unwrap();
    }
    s
}
