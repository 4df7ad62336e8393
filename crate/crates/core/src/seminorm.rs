//! Sobolev seminorms `|f|_{W^m_2(region)}` by composite Gauss-Legendre
//! quadrature in polar coordinates about the region's center (intervals in
//! 1-D), with a Richardson error estimate, far-field truncation estimates and
//! nested tail profiles.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{dist, PointSet, Region};
use crate::interpolation::Interpolant;
use crate::kernel::{factorial, multi_indices_of_degree};
use crate::par;

/// Growth factor of radial cells beyond the core radius.
const GEOMETRIC_RATIO: f64 = 1.25;
const MAX_ANGULAR_CELLS: usize = 256;
const MIN_ANGULAR_CELLS: usize = 16;
/// Denominator below which a tail ratio is reported as exhausted.
pub const TAIL_FLOOR: f64 = 1e-14;

/// A function with partial derivatives, for seminorm quadrature.
pub trait Differentiable: Sync {
    fn dim(&self) -> usize;

    /// `D^beta f(x)`.
    fn partial(&self, x: &[f64], beta: &[usize]) -> Result<f64>;

    /// Points where the partials lose smoothness; quadrature cells are split
    /// at them (1-D) and nodes closer than the exclusion radius are skipped (2-D).
    fn breakpoints(&self) -> Option<&PointSet> {
        None
    }
}

impl Differentiable for Interpolant {
    fn dim(&self) -> usize {
        self.order().dim()
    }

    fn partial(&self, x: &[f64], beta: &[usize]) -> Result<f64> {
        Interpolant::partial(self, x, beta)
    }

    fn breakpoints(&self) -> Option<&PointSet> {
        Some(self.centers())
    }
}

/// Wraps a closure `(x, beta) -> D^beta f(x)`.
pub struct FnPartials<F> {
    dim: usize,
    f: F,
    breakpoints: Option<PointSet>,
}

impl<F> FnPartials<F>
where
    F: Fn(&[f64], &[usize]) -> f64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnPartials {
            dim,
            f,
            breakpoints: None,
        }
    }

    pub fn with_breakpoints(mut self, points: PointSet) -> Self {
        self.breakpoints = Some(points);
        self
    }
}

impl<F> Differentiable for FnPartials<F>
where
    F: Fn(&[f64], &[usize]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn partial(&self, x: &[f64], beta: &[usize]) -> Result<f64> {
        Ok((self.f)(x, beta))
    }

    fn breakpoints(&self) -> Option<&PointSet> {
        self.breakpoints.as_ref()
    }
}

/// Quadrature parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Legendre points per cell and direction.
    pub order: usize,
    /// Cells per unit length inside the core radius.
    pub cells_per_unit: f64,
    /// Outer radius for ball complements; `None` picks the default.
    pub truncation: Option<f64>,
    /// Nodes closer than this to a breakpoint are skipped in 2-D.
    pub exclusion: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 8,
            cells_per_unit: 16.0,
            truncation: None,
            exclusion: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.order < 4 {
            return Err(Error::InvalidArgument(format!("quadrature order {} < 4", self.order)));
        }
        if !(self.cells_per_unit > 0.0) || !self.cells_per_unit.is_finite() {
            return Err(Error::InvalidArgument("cells per unit must be positive".into()));
        }
        if !(self.exclusion > 0.0) {
            return Err(Error::InvalidArgument("exclusion radius must be positive".into()));
        }
        if let Some(t) = self.truncation {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument("truncation radius must be positive".into()));
            }
        }
        Ok(())
    }

    /// Truncation radius about `center` for `f`: the configured value, or the
    /// breakpoint spread plus four times the breakpoint diameter.
    pub fn truncation_for(&self, f: &dyn Differentiable, center: &[f64]) -> f64 {
        if let Some(t) = self.truncation {
            return t;
        }
        match f.breakpoints() {
            Some(b) if !b.is_empty() => {
                let spread = b.iter().map(|p| dist(p, center)).fold(0.0, f64::max);
                let (lo, hi) = b.bounds();
                let diam = dist(&lo, &hi).max(1.0 / self.cells_per_unit);
                spread + 4.0 * diam
            }
            _ => 4.0,
        }
    }
}

/// A seminorm value with its error bars.
#[derive(Clone, Debug, PartialEq)]
pub struct SeminormEstimate {
    pub value: f64,
    /// `value^2`.
    pub squared: f64,
    /// `|value(2N) - value(N)|` for `N` and `2N` cells per direction.
    pub quad_error: f64,
    /// Estimated squared contribution discarded beyond the truncation radius
    /// (0 for bounded regions, infinite when the far field does not decay).
    pub truncation_tail: f64,
    /// Quadrature nodes skipped near breakpoints.
    pub excluded_nodes: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// `sum_{|beta| = m} m!/beta! |D^beta f(x)|^2`, or `None` at a singular point.
fn integrand(f: &dyn Differentiable, x: &[f64], betas: &[(Vec<usize>, f64)]) -> Result<Option<f64>> {
    let mut acc = 0.0;
    for (beta, weight) in betas {
        match f.partial(x, beta) {
            Ok(v) => acc += weight * v * v,
            Err(Error::SingularPoint { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(acc))
}

fn weighted_betas(d: usize, m: usize) -> Vec<(Vec<usize>, f64)> {
    multi_indices_of_degree(d, m)
        .into_iter()
        .map(|b| {
            let w = factorial(m) / b.iter().map(|&k| factorial(k)).product::<f64>();
            (b, w)
        })
        .collect()
}

/// Radial breakpoints on `[a, b]`: a uniform lattice of width `1/cpu` up to
/// the core radius, geometric growth beyond it, plus `extra` kinks.
fn radial_partition(a: f64, b: f64, core: f64, cpu: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a, b];
    let h = 1.0 / cpu;
    let k0 = (a / h).floor() as i64 + 1;
    let mut k = k0;
    loop {
        let r = k as f64 * h;
        if r >= b || r > core {
            break;
        }
        pts.push(r);
        k += 1;
    }
    let mut r = core.max(a);
    loop {
        let step = (r * (GEOMETRIC_RATIO - 1.0)).max(h);
        r += step;
        if r >= b {
            break;
        }
        if r > a {
            pts.push(r);
        }
    }
    for &e in extra {
        if e > a && e < b {
            pts.push(e);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1.0));
    pts
}

fn refine(cells: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * cells.len());
    for w in cells.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    if let Some(&last) = cells.last() {
        out.push(last);
    }
    out
}

/// Angular partition of `[0, 2 pi)`.
fn angular_cells(core: f64, cpu: f64) -> usize {
    ((2.0 * std::f64::consts::PI * core * cpu).ceil() as usize).clamp(MIN_ANGULAR_CELLS, MAX_ANGULAR_CELLS)
}

struct Integrator<'a> {
    f: &'a dyn Differentiable,
    betas: Vec<(Vec<usize>, f64)>,
    center: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exclusion: f64,
    angular: usize,
}

impl Integrator<'_> {
    fn near_breakpoint(&self, x: &[f64]) -> bool {
        match self.f.breakpoints() {
            Some(b) => b.iter().any(|p| dist(p, x) < self.exclusion),
            None => false,
        }
    }

    /// Integral over the radial shell `[r0, r1]` split into the given radial
    /// cells, with `angular_factor` times the base angular cells in 2-D.
    /// Returns (integral, excluded nodes).
    fn shells(&self, radii: &[f64], angular_factor: usize) -> Result<(f64, usize)> {
        let d = self.center.len();
        if radii.len() < 2 {
            return Ok((0.0, 0));
        }
        let ncells = radii.len() - 1;
        let results: Vec<Result<(f64, usize)>> = match d {
            1 => par::map_indexed(ncells, |c| self.cell_1d(radii[c], radii[c + 1])),
            2 => {
                let na = self.angular * angular_factor;
                par::map_indexed(ncells * na, |k| {
                    let (c, a) = (k / na, k % na);
                    let dt = 2.0 * std::f64::consts::PI / na as f64;
                    self.cell_2d(radii[c], radii[c + 1], a as f64 * dt, (a + 1) as f64 * dt)
                })
            }
            _ => unreachable!("dimension checked by caller"),
        };
        let mut values = Vec::with_capacity(results.len());
        let mut excluded = 0;
        for r in results {
            let (v, e) = r?;
            values.push(v);
            excluded += e;
        }
        Ok((par::pairwise_sum(&values), excluded))
    }

    fn cell_1d(&self, r0: f64, r1: f64) -> Result<(f64, usize)> {
        let half = 0.5 * (r1 - r0);
        let mid = 0.5 * (r1 + r0);
        let mut acc = 0.0;
        let mut excluded = 0;
        for side in [-1.0, 1.0] {
            for (z, w) in self.nodes.iter().zip(&self.weights) {
                let x = [self.center[0] + side * (mid + half * z)];
                match integrand(self.f, &x, &self.betas)? {
                    Some(v) => acc += w * half * v,
                    None => excluded += 1,
                }
            }
        }
        Ok((acc, excluded))
    }

    fn cell_2d(&self, r0: f64, r1: f64, t0: f64, t1: f64) -> Result<(f64, usize)> {
        let hr = 0.5 * (r1 - r0);
        let mr = 0.5 * (r1 + r0);
        let ht = 0.5 * (t1 - t0);
        let mt = 0.5 * (t1 + t0);
        let mut acc = 0.0;
        let mut excluded = 0;
        let mut x = [0.0; 2];
        for (zr, wr) in self.nodes.iter().zip(&self.weights) {
            let r = mr + hr * zr;
            for (zt, wt) in self.nodes.iter().zip(&self.weights) {
                let t = mt + ht * zt;
                x[0] = self.center[0] + r * t.cos();
                x[1] = self.center[1] + r * t.sin();
                if self.near_breakpoint(&x) {
                    excluded += 1;
                    continue;
                }
                match integrand(self.f, &x, &self.betas)? {
                    Some(v) => acc += wr * wt * hr * ht * r * v,
                    None => excluded += 1,
                }
            }
        }
        Ok((acc, excluded))
    }
}

struct Setup<'a> {
    integrator: Integrator<'a>,
    kinks: Vec<f64>,
    core: f64,
    cpu: f64,
}

fn setup<'a>(f: &'a dyn Differentiable, m: usize, center: &[f64], spec: &QuadratureSpec) -> Result<Setup<'a>> {
    spec.validate()?;
    let d = f.dim();
    if d > 2 {
        return Err(Error::Unsupported(format!("seminorm quadrature in dimension {d}")));
    }
    if center.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: center.len(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("seminorm order must be positive".into()));
    }
    let (kinks, core) = match f.breakpoints() {
        Some(b) if !b.is_empty() => {
            let radii: Vec<f64> = b.iter().map(|p| dist(p, center)).collect();
            let core = radii.iter().cloned().fold(0.0, f64::max) + 1.0 / spec.cells_per_unit;
            // in 2-D the kinks are not radial, so only 1-D uses them as cell edges
            (if d == 1 { radii } else { Vec::new() }, core)
        }
        _ => (Vec::new(), 0.0),
    };
    let (nodes, weights) = gauss_legendre(spec.order);
    Ok(Setup {
        integrator: Integrator {
            f,
            betas: weighted_betas(d, m),
            center: center.to_vec(),
            nodes,
            weights,
            exclusion: spec.exclusion,
            angular: 1,
        },
        kinks,
        core,
        cpu: spec.cells_per_unit,
    })
}

impl Setup<'_> {
    fn with_extent(mut self, outer: f64) -> Self {
        if self.core == 0.0 {
            self.core = outer;
        }
        self.integrator.angular = angular_cells(self.core, self.cpu);
        self
    }

    /// Squared integral over `[a, b]` at base and doubled resolution.
    fn integrate(&self, a: f64, b: f64) -> Result<(f64, f64, usize)> {
        if b <= a {
            return Ok((0.0, 0.0, 0));
        }
        let coarse = radial_partition(a, b, self.core, self.cpu, &self.kinks);
        let fine = refine(&coarse);
        let (i1, _) = self.integrator.shells(&coarse, 1)?;
        let (i2, excluded) = self.integrator.shells(&fine, 2)?;
        Ok((i1, i2, excluded))
    }

    /// Squared integral discarded beyond `t`, from the geometric decay of the
    /// two outermost shells `[t/q^2, t/q]`, `[t/q, t]`.
    fn far_field(&self, inner: f64, t: f64) -> Result<f64> {
        let q = GEOMETRIC_RATIO;
        if t / (q * q) < inner {
            return Ok(f64::NAN);
        }
        let (_, a, _) = self.integrate(t / (q * q), t / q)?;
        let (_, b, _) = self.integrate(t / q, t)?;
        if b <= 0.0 {
            return Ok(0.0);
        }
        if a <= 0.0 || b >= a {
            return Ok(f64::INFINITY);
        }
        let ratio = b / a;
        Ok(b * ratio / (1.0 - ratio))
    }
}

/// `|f|_{W^m_2(region)}`: the square root of
/// `sum_{|beta|=m} m!/beta! int_region |D^beta f|^2`.
pub fn sobolev_seminorm(
    f: &dyn Differentiable,
    m: usize,
    region: &Region,
    spec: &QuadratureSpec,
) -> Result<SeminormEstimate> {
    region.validate()?;
    let (inner, outer) = region.radial_extent();
    let s = setup(f, m, region.center(), spec)?.with_extent(outer);
    let (i1, i2, excluded) = s.integrate(inner, outer)?;
    let truncation_tail = match region {
        Region::Complement { .. } => s.far_field(inner, outer)?,
        _ => 0.0,
    };
    let value = i2.max(0.0).sqrt();
    Ok(SeminormEstimate {
        value,
        squared: i2,
        quad_error: (value - i1.max(0.0).sqrt()).abs(),
        truncation_tail,
        excluded_nodes: excluded,
    })
}

/// Tail seminorms `|chi|_{W^m_2(B^c(center, T))}` for increasing `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailProfile {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub truncation: f64,
    pub tails: Vec<f64>,
    pub quad_errors: Vec<f64>,
    /// Estimated squared far-field contribution beyond the truncation radius.
    pub truncation_tail: f64,
    pub excluded_nodes: usize,
}

impl TailProfile {
    /// CSV with columns `T,tail_seminorm,quad_error`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("T,tail_seminorm,quad_error\n");
        for ((t, v), e) in self.radii.iter().zip(&self.tails).zip(&self.quad_errors) {
            writeln!(s, "{t:.16e},{v:.16e},{e:.16e}").unwrap();
        }
        s
    }
}

/// Tail profile over nested complements of balls about `center`. Shell
/// integrals between consecutive radii are accumulated from the outside in,
/// so the profile is nonincreasing by construction.
pub fn tail_profile(
    f: &dyn Differentiable,
    center: &[f64],
    radii: &[f64],
    m: usize,
    spec: &QuadratureSpec,
) -> Result<TailProfile> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("tail profile needs at least one radius".into()));
    }
    if radii.iter().any(|r| !(*r >= 0.0)) || radii.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(
            "tail radii must be nonnegative and nondecreasing".into(),
        ));
    }
    let truncation = spec.truncation_for(f, center);
    let last = *radii.last().expect("nonempty");
    if last > truncation {
        return Err(Error::InvalidArgument(format!(
            "tail radius {last} exceeds the truncation radius {truncation}"
        )));
    }
    let s = setup(f, m, center, spec)?.with_extent(truncation);
    let mut edges = radii.to_vec();
    edges.push(truncation);
    let mut coarse = Vec::with_capacity(radii.len());
    let mut fine = Vec::with_capacity(radii.len());
    let mut excluded = 0;
    for w in edges.windows(2) {
        let (a, b, e) = s.integrate(w[0], w[1])?;
        coarse.push(a);
        fine.push(b);
        excluded += e;
    }
    let n = radii.len();
    let mut tails = vec![0.0; n];
    let mut quad_errors = vec![0.0; n];
    let (mut acc_fine, mut acc_coarse) = (0.0f64, 0.0f64);
    for i in (0..n).rev() {
        acc_fine += fine[i].max(0.0);
        acc_coarse += coarse[i].max(0.0);
        tails[i] = acc_fine.sqrt();
        quad_errors[i] = (tails[i] - acc_coarse.sqrt()).abs();
    }
    Ok(TailProfile {
        center: center.to_vec(),
        radii: radii.to_vec(),
        truncation,
        tails,
        quad_errors,
        truncation_tail: s.far_field(radii[0], truncation)?,
        excluded_nodes: excluded,
    })
}

/// Ratio of the tail seminorms outside `B(center, outer)` and `B(center, inner)`.
pub fn tail_ratio(
    f: &dyn Differentiable,
    center: &[f64],
    inner: f64,
    outer: f64,
    m: usize,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if outer < inner {
        return Err(Error::InvalidArgument("outer radius below inner radius".into()));
    }
    let p = tail_profile(f, center, &[inner, outer], m, spec)?;
    if p.tails[0] < TAIL_FLOOR {
        return Err(Error::TailExhausted { value: p.tails[0] });
    }
    Ok(p.tails[1] / p.tails[0])
}

/// Measured contraction `|chi|(outside rho t^(1/eps)) / |chi|(outside rho (t-3)^(1/eps))`.
pub fn bulk_ratio(
    f: &dyn Differentiable,
    center: &[f64],
    rho: f64,
    epsilon: f64,
    t: f64,
    m: usize,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(t > 3.0) {
        return Err(Error::InvalidArgument(format!("bulk ratio needs t > 3, got {t}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) || !(rho > 0.0) {
        return Err(Error::InvalidArgument(
            "bulk ratio needs rho > 0 and 0 < eps <= 1".into(),
        ));
    }
    let inner = rho * (t - 3.0).powf(1.0 / epsilon);
    let outer = rho * t.powf(1.0 / epsilon);
    tail_ratio(f, center, inner, outer, m, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::lagrange_basis_points;
    use crate::kernel::SplineOrder;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [4, 5, 8, 12] {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
                assert!((q - exact).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn quadratic_on_unit_interval() {
        let f = FnPartials::new(1, |x: &[f64], b: &[usize]| match b[0] {
            0 => x[0] * x[0],
            1 => 2.0 * x[0],
            2 => 2.0,
            _ => 0.0,
        });
        let r = Region::ball(vec![0.5], 0.5).unwrap();
        let s = sobolev_seminorm(&f, 2, &r, &QuadratureSpec::default()).unwrap();
        assert!((s.value - 2.0).abs() < 1e-8);
        assert_eq!(s.truncation_tail, 0.0);
    }

    #[test]
    fn squared_radius_on_disk() {
        let f = FnPartials::new(
            2,
            |_x: &[f64], b: &[usize]| if b == [2, 0] || b == [0, 2] { 2.0 } else { 0.0 },
        );
        let r = Region::ball(vec![0.0, 0.0], 1.0).unwrap();
        let s = sobolev_seminorm(&f, 2, &r, &QuadratureSpec::default()).unwrap();
        assert!((s.value - (8.0 * std::f64::consts::PI).sqrt()).abs() < 1e-5);
    }

    #[test]
    fn unsupported_dimension() {
        let f = FnPartials::new(3, |_x: &[f64], _b: &[usize]| 0.0);
        let r = Region::ball(vec![0.0; 3], 1.0).unwrap();
        assert!(matches!(
            sobolev_seminorm(&f, 2, &r, &QuadratureSpec::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn hat_tail_vanishes_outside_support() {
        let lag = lagrange_basis_points(&PointSet::line(&[0.0, 1.0, 2.0]), SplineOrder::new(1, 1).unwrap()).unwrap();
        let hat = lag.function(1);
        let spec = QuadratureSpec {
            truncation: Some(6.0),
            ..Default::default()
        };
        let p = tail_profile(&hat, &[1.0], &[0.0, 0.5, 1.0, 2.0, 4.0], 1, &spec).unwrap();
        // |hat'| = 1 on (0, 2): squared seminorm 2, outside B(1, 0.5) it is 1
        assert!((p.tails[0] - 2f64.sqrt()).abs() < 1e-12);
        assert!((p.tails[1] - 1.0).abs() < 1e-12);
        for t in &p.tails[2..] {
            assert!(*t < 1e-12);
        }
        assert!(p.tails.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(tail_ratio(&hat, &[1.0], 0.5, 0.5, 1, &spec).unwrap(), 1.0);
        assert!(tail_ratio(&hat, &[1.0], 0.5, 1.5, 1, &spec).unwrap() < 1e-12);
        assert!(matches!(
            tail_ratio(&hat, &[1.0], 1.5, 2.0, 1, &spec),
            Err(Error::TailExhausted { .. })
        ));
    }

    #[test]
    fn partition_includes_kinks() {
        let p = radial_partition(0.0, 3.0, 1.0, 2.0, &[0.3, 2.9]);
        assert_eq!(p[0], 0.0);
        assert_eq!(*p.last().unwrap(), 3.0);
        assert!(p.contains(&0.3) && p.contains(&2.9) && p.contains(&0.5));
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }
}
