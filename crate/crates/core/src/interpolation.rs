//! Surface spline interpolants: assembly and solution of the bordered
//! (saddle-point) system, evaluation, Lagrange bases and the native energy.
//!
//! Everything is assembled in normalized coordinates `t = (x - c) / s`, where
//! `c` is the centroid of the centers and `s` the largest center distance from
//! it. For even `d` the extra `log s` term produced by rescaling the kernel is
//! a polynomial of degree at most `m - d` and is absorbed by the polynomial
//! part, so the normalized interpolant is the same function.

use std::sync::{Arc, OnceLock};

use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::geometry::{CenterSet, PointSet};
use crate::kernel::{multi_indices_of_degree, poly_dim, KernelPartial, PolyBasis, SplineOrder};
use crate::linalg::{LdlFactor, SquareMatrix};
use crate::par;
use crate::INTERPOLATION_TOL;

/// Condition estimates above this are logged as warnings.
pub const CONDITION_WARN: f64 = 1e10;
/// Condition estimates above this are rejected.
pub const CONDITION_MAX: f64 = 1e14;
/// Relative singular-value threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Outcome of a unisolvency check.
#[derive(Clone, Debug, PartialEq)]
pub struct UnisolvencyReport {
    pub unisolvent: bool,
    pub degree: usize,
    pub rank: usize,
    pub required: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub threshold: f64,
}

/// Normalization `(centroid, radius)` of a point set; the radius falls back
/// to 1 for a single point.
pub fn normalization(points: &PointSet) -> (Vec<f64>, f64) {
    let c = points.centroid();
    let s = points.iter().map(|p| crate::geometry::dist(p, &c)).fold(0.0, f64::max);
    (c, if s > 0.0 { s } else { 1.0 })
}

/// Numerical rank of the normalized `Pi_degree` Vandermonde matrix on `points`.
/// Singular values below `RANK_TOL * sigma_max` count as zero.
pub fn check_unisolvent(points: &PointSet, degree: usize) -> UnisolvencyReport {
    let (c, s) = normalization(points);
    let basis = PolyBasis::new(degree, c, s).expect("valid normalization");
    let required = basis.len();
    let threshold_rel = RANK_TOL;
    if points.len() < required {
        let rank = if points.is_empty() {
            0
        } else {
            rank_of(&basis, points).0
        };
        return UnisolvencyReport {
            unisolvent: false,
            degree,
            rank,
            required,
            sigma_max: f64::NAN,
            sigma_min: 0.0,
            threshold: threshold_rel,
        };
    }
    let (rank, smax, smin) = rank_of(&basis, points);
    UnisolvencyReport {
        unisolvent: rank == required,
        degree,
        rank,
        required,
        sigma_max: smax,
        sigma_min: smin,
        threshold: threshold_rel,
    }
}

fn rank_of(basis: &PolyBasis, points: &PointSet) -> (usize, f64, f64) {
    let v = basis.vandermonde(points).expect("dimension checked");
    let sv = SVD::new(v, false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let rank = sv.iter().filter(|&&v| v > RANK_TOL * smax).count();
    (rank, smax, smin)
}

/// Centers, order and normalization shared by interpolants on the same set.
#[derive(Debug)]
pub struct SplineSpace {
    order: SplineOrder,
    centers: PointSet,
    normalized: PointSet,
    center: Vec<f64>,
    scale: f64,
    basis: PolyBasis,
    partials: OnceLock<Vec<KernelPartial>>,
}

impl SplineSpace {
    pub fn new(centers: &PointSet, order: SplineOrder) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyCenters);
        }
        if centers.dim() != order.dim() {
            return Err(Error::DimensionMismatch {
                expected: order.dim(),
                got: centers.dim(),
            });
        }
        let (c, s) = normalization(centers);
        Self::with_normalization(centers, order, c, s)
    }

    fn with_normalization(centers: &PointSet, order: SplineOrder, c: Vec<f64>, s: f64) -> Result<Self> {
        let shift: Vec<f64> = c.iter().map(|v| -v / s).collect();
        let normalized = centers.affine(1.0 / s, &shift);
        let basis = PolyBasis::new(order.m() - 1, c.clone(), s)?;
        Ok(SplineSpace {
            order,
            centers: centers.clone(),
            normalized,
            center: c,
            scale: s,
            basis,
            partials: OnceLock::new(),
        })
    }

    pub fn order(&self) -> SplineOrder {
        self.order
    }

    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn poly_basis(&self) -> &PolyBasis {
        &self.basis
    }

    pub fn normalization(&self) -> (&[f64], f64) {
        (&self.center, self.scale)
    }

    fn to_normalized(&self, x: &[f64], t: &mut [f64]) {
        for k in 0..t.len() {
            t[k] = (x[k] - self.center[k]) / self.scale;
        }
    }

    /// Kernel translates `phi(|t - t_j|)` at `x`, in center order.
    pub fn kernel_row(&self, x: &[f64], out: &mut [f64]) {
        let d = self.order.dim();
        let mut t = vec![0.0; d];
        self.to_normalized(x, &mut t);
        for (o, c) in out.iter_mut().zip(self.normalized.iter()) {
            let r = crate::geometry::dist(&t, c);
            *o = self.order.phi(r);
        }
    }

    fn kernel_partials(&self) -> &[KernelPartial] {
        self.partials.get_or_init(|| {
            let d = self.order.dim();
            (0..=self.order.m())
                .flat_map(|k| multi_indices_of_degree(d, k))
                .map(|b| KernelPartial::new(self.order, &b).expect("order within m"))
                .collect()
        })
    }

    fn kernel_partial_for(&self, beta: &[usize]) -> Result<&KernelPartial> {
        self.kernel_partials()
            .iter()
            .find(|p| p.beta() == beta)
            .ok_or_else(|| Error::InvalidArgument(format!("partial {beta:?} unavailable (order > m)")))
    }

    fn assemble(&self) -> SquareMatrix {
        let n = self.len();
        let mp = self.basis.len();
        let mut a = SquareMatrix::zeros(n + mp);
        for i in 0..n {
            for j in 0..i {
                let r = crate::geometry::dist(self.normalized.point(i), self.normalized.point(j));
                let v = self.order.phi(r);
                a.set(i, j, v);
                a.set(j, i, v);
            }
            a.set(i, i, self.order.phi(0.0));
            let p = self.basis.eval_all(self.centers.point(i));
            for (k, v) in p.into_iter().enumerate() {
                a.set(i, n + k, v);
                a.set(n + k, i, v);
            }
        }
        a
    }
}

/// Factored bordered system for a center set.
#[derive(Debug)]
struct SaddleSystem {
    matrix: SquareMatrix,
    factor: LdlFactor,
    condition: f64,
}

impl SaddleSystem {
    fn new(space: &SplineSpace, ridge: f64) -> Result<Self> {
        let unis = check_unisolvent(space.centers(), space.order().m() - 1);
        if !unis.unisolvent {
            return Err(Error::NotUnisolvent {
                degree: unis.degree,
                rank: unis.rank,
                required: unis.required,
            });
        }
        let mut matrix = space.assemble();
        if ridge != 0.0 {
            for i in 0..space.len() {
                let v = matrix.get(i, i) + ridge * space.order().energy_sign();
                matrix.set(i, i, v);
            }
        }
        let factor = LdlFactor::new(&matrix)?;
        let condition = factor.condition_estimate();
        if !(condition <= CONDITION_MAX) {
            return Err(Error::IllConditioned { estimate: condition });
        }
        if condition > CONDITION_WARN {
            log::warn!("interpolation system condition estimate {condition:.3e} exceeds {CONDITION_WARN:.0e}");
        }
        Ok(SaddleSystem {
            matrix,
            factor,
            condition,
        })
    }

    /// Solve with one step of iterative refinement.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.factor.solve(rhs);
        let ax = self.matrix.mul_vec(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, v)| b - v).collect();
        let dx = self.factor.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
        x
    }
}

/// An element of the surface spline space: kernel translates plus a
/// polynomial of degree `m - 1`, with kernel coefficients annihilating
/// `Pi_{m-1}`.
#[derive(Clone, Debug)]
pub struct Interpolant {
    space: Arc<SplineSpace>,
    kernel: Vec<f64>,
    poly: Vec<f64>,
    condition: f64,
}

/// Fits the surface spline interpolant to `data` on `centers`.
pub fn fit(centers: &CenterSet, data: &[f64], order: SplineOrder) -> Result<Interpolant> {
    fit_points(centers.points(), data, order)
}

/// As [`fit`], for a bare point set (duplicates are reported as a
/// factorization or conditioning failure).
pub fn fit_points(points: &PointSet, data: &[f64], order: SplineOrder) -> Result<Interpolant> {
    let space = Arc::new(SplineSpace::new(points, order)?);
    fit_in_space(space, data, 0.0)
}

/// Ridge-regularized fit: `(Phi + lambda I) A + P c = f`, `P^T A = 0`. The
/// result lies in the same spline space but does not interpolate.
pub fn fit_smoothing(centers: &CenterSet, data: &[f64], order: SplineOrder, lambda: f64) -> Result<Interpolant> {
    let space = Arc::new(SplineSpace::new(centers.points(), order)?);
    fit_in_space(space, data, lambda)
}

fn fit_in_space(space: Arc<SplineSpace>, data: &[f64], ridge: f64) -> Result<Interpolant> {
    let n = space.len();
    if data.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: data.len(),
        });
    }
    let system = SaddleSystem::new(&space, ridge)?;
    let mut rhs = data.to_vec();
    rhs.resize(n + space.basis.len(), 0.0);
    let sol = system.solve(&rhs);
    let interp = Interpolant {
        kernel: sol[..n].to_vec(),
        poly: sol[n..].to_vec(),
        condition: system.condition,
        space,
    };
    if ridge == 0.0 {
        let scale = data.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let tolerance = INTERPOLATION_TOL * scale;
        let residual = (0..n)
            .map(|i| (interp.evaluate(interp.space.centers.point(i)) - data[i]).abs())
            .fold(0.0, f64::max);
        if residual > tolerance {
            return Err(Error::Residual { residual, tolerance });
        }
    }
    Ok(interp)
}

impl Interpolant {
    pub fn space(&self) -> &Arc<SplineSpace> {
        &self.space
    }

    pub fn order(&self) -> SplineOrder {
        self.space.order
    }

    pub fn centers(&self) -> &PointSet {
        &self.space.centers
    }

    /// Kernel coefficients in normalized coordinates.
    pub fn kernel_coefficients(&self) -> &[f64] {
        &self.kernel
    }

    /// Coefficients of the polynomial part in the normalized basis.
    pub fn poly_coefficients(&self) -> &[f64] {
        &self.poly
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let n = self.space.len();
        let mut row = vec![0.0; n];
        self.space.kernel_row(x, &mut row);
        let p = self.space.basis.eval_all(x);
        let k: f64 = row.iter().zip(&self.kernel).map(|(a, b)| a * b).sum();
        let q: f64 = p.iter().zip(&self.poly).map(|(a, b)| a * b).sum();
        k + q
    }

    /// Batch evaluation; each entry is computed exactly as [`Self::evaluate`].
    pub fn evaluate_batch(&self, points: &PointSet) -> Vec<f64> {
        par::map_indexed(points.len(), |i| self.evaluate(points.point(i)))
    }

    /// `D^beta` of the interpolant at `x`, for `|beta| <= m`.
    pub fn partial(&self, x: &[f64], beta: &[usize]) -> Result<f64> {
        let sp = &self.space;
        let kp = sp.kernel_partial_for(beta)?;
        let d = sp.order.dim();
        let mut t = vec![0.0; d];
        sp.to_normalized(x, &mut t);
        let mut diff = vec![0.0; d];
        let mut k = 0.0;
        for (a, c) in self.kernel.iter().zip(sp.normalized.iter()) {
            for j in 0..d {
                diff[j] = t[j] - c[j];
            }
            k += a * kp.eval(&diff)?;
        }
        let total: usize = beta.iter().sum();
        let chain = sp.scale.powi(-(total as i32));
        let q: f64 = sp
            .basis
            .partial_all(x, beta)
            .iter()
            .zip(&self.poly)
            .map(|(a, b)| a * b)
            .sum();
        Ok(chain * k + q)
    }

    /// Largest `|sum_xi A_xi p(xi)|` over the normalized basis of `Pi_{m-1}`,
    /// relative to `sum |A_xi|`.
    pub fn side_condition_violation(&self) -> f64 {
        let total: f64 = self.kernel.iter().map(|a| a.abs()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let sp = &self.space;
        let mut moments = vec![0.0; sp.basis.len()];
        for (a, x) in self.kernel.iter().zip(sp.centers.iter()) {
            for (m, p) in moments.iter_mut().zip(sp.basis.eval_all(x)) {
                *m += a * p;
            }
        }
        moments.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())) / total
    }

    /// The kernel quadratic form `sign * A^T Phi A` in original units; equal to
    /// the squared order-`m` seminorm up to a positive `(m, d)` constant.
    pub fn native_energy(&self) -> Result<f64> {
        let violation = self.side_condition_violation();
        if violation > INTERPOLATION_TOL {
            return Err(Error::SideConditions { violation });
        }
        let sp = &self.space;
        let n = sp.len();
        let mut acc = 0.0;
        for i in 0..n {
            if self.kernel[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..n {
                let r = crate::geometry::dist(sp.normalized.point(i), sp.normalized.point(j));
                row += sp.order.phi(r) * self.kernel[j];
            }
            acc += self.kernel[i] * row;
        }
        let k = sp.order.power();
        Ok(sp.order.energy_sign() * acc * sp.scale.powi(-k))
    }

    /// Breakpoints of the piecewise-smooth structure along the line (1-D only).
    pub fn kinks(&self) -> Vec<f64> {
        if self.space.order.dim() == 1 {
            self.space.centers.as_flat().to_vec()
        } else {
            Vec::new()
        }
    }

    /// Text record with 17 significant digits; [`Interpolant::from_text`]
    /// restores it exactly.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let sp = &self.space;
        let mut s = String::new();
        let fmt = |v: f64| format!("{v:.16e}");
        writeln!(s, "# splinestab interpolant v1").unwrap();
        writeln!(s, "dim {}", sp.order.dim()).unwrap();
        writeln!(s, "m {}", sp.order.m()).unwrap();
        writeln!(s, "n {}", sp.len()).unwrap();
        let c: Vec<String> = sp.center.iter().map(|v| fmt(*v)).collect();
        writeln!(s, "normalization {} {}", c.join(" "), fmt(sp.scale)).unwrap();
        writeln!(s, "condition {}", fmt(self.condition)).unwrap();
        writeln!(s, "centers").unwrap();
        for p in sp.centers.iter() {
            let row: Vec<String> = p.iter().map(|v| fmt(*v)).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        writeln!(s, "kernel").unwrap();
        for a in &self.kernel {
            writeln!(s, "{}", fmt(*a)).unwrap();
        }
        writeln!(s, "poly").unwrap();
        for a in &self.poly {
            writeln!(s, "{}", fmt(*a)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, message: String| Error::Parse {
            source_name: "interpolant".into(),
            line,
            message,
        };
        let mut next = |expect: &str| -> Result<(usize, Vec<String>)> {
            let (ln, l) = lines.next().ok_or_else(|| perr(0, format!("missing `{expect}`")))?;
            let fields: Vec<String> = l.split_whitespace().map(String::from).collect();
            if !expect.is_empty() && fields.first().map(String::as_str) != Some(expect) {
                return Err(perr(ln, format!("expected `{expect}`")));
            }
            Ok((ln, fields))
        };
        let num = |ln: usize, s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| perr(ln, e.to_string())) };
        let int = |ln: usize, s: &str| -> Result<usize> { s.parse::<usize>().map_err(|e| perr(ln, e.to_string())) };

        let (ln, f) = next("dim")?;
        let d = int(ln, f.get(1).map(String::as_str).unwrap_or(""))?;
        let (ln, f) = next("m")?;
        let m = int(ln, f.get(1).map(String::as_str).unwrap_or(""))?;
        let (ln, f) = next("n")?;
        let n = int(ln, f.get(1).map(String::as_str).unwrap_or(""))?;
        let (ln, f) = next("normalization")?;
        if f.len() != d + 2 {
            return Err(perr(ln, "normalization needs d + 1 values".into()));
        }
        let center = f[1..=d].iter().map(|v| num(ln, v)).collect::<Result<Vec<_>>>()?;
        let scale = num(ln, &f[d + 1])?;
        let (ln, f) = next("condition")?;
        let condition = num(ln, f.get(1).map(String::as_str).unwrap_or(""))?;
        next("centers")?;
        let mut pts = PointSet::new(d);
        for _ in 0..n {
            let (ln, f) = next("")?;
            let p = f.iter().map(|v| num(ln, v)).collect::<Result<Vec<_>>>()?;
            pts.push(&p).map_err(|e| perr(ln, e.to_string()))?;
        }
        next("kernel")?;
        let mut kernel = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, f) = next("")?;
            kernel.push(num(ln, &f[0])?);
        }
        next("poly")?;
        let order = SplineOrder::new(m, d)?;
        let mp = poly_dim(m - 1, d);
        let mut poly = Vec::with_capacity(mp);
        for _ in 0..mp {
            let (ln, f) = next("")?;
            poly.push(num(ln, &f[0])?);
        }
        let space = SplineSpace::with_normalization(&pts, order, center, scale)?;
        Ok(Interpolant {
            space: Arc::new(space),
            kernel,
            poly,
            condition,
        })
    }
}

/// Lagrange (cardinal) functions of a center set, sharing one factorization.
#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    space: Arc<SplineSpace>,
    /// Row `i` holds the kernel then polynomial coefficients of `chi_i`.
    coefficients: Vec<Vec<f64>>,
    condition: f64,
}

pub fn lagrange_basis(centers: &CenterSet, order: SplineOrder) -> Result<LagrangeBasis> {
    lagrange_basis_points(centers.points(), order)
}

pub fn lagrange_basis_points(points: &PointSet, order: SplineOrder) -> Result<LagrangeBasis> {
    let space = Arc::new(SplineSpace::new(points, order)?);
    let system = SaddleSystem::new(&space, 0.0)?;
    let n = space.len();
    let size = n + space.basis.len();
    let coefficients = par::map_indexed(n, |i| {
        let mut rhs = vec![0.0; size];
        rhs[i] = 1.0;
        system.solve(&rhs)
    });
    Ok(LagrangeBasis {
        space,
        coefficients,
        condition: system.condition,
    })
}

impl LagrangeBasis {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn order(&self) -> SplineOrder {
        self.space.order
    }

    pub fn centers(&self) -> &PointSet {
        &self.space.centers
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// `chi_xi(x)` for every center, in center order.
    pub fn values_at(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut row = vec![0.0; n];
        self.space.kernel_row(x, &mut row);
        let p = self.space.basis.eval_all(x);
        self.coefficients
            .iter()
            .map(|c| {
                let k: f64 = row.iter().zip(&c[..n]).map(|(a, b)| a * b).sum();
                let q: f64 = p.iter().zip(&c[n..]).map(|(a, b)| a * b).sum();
                k + q
            })
            .collect()
    }

    pub fn value(&self, index: usize, x: &[f64]) -> f64 {
        let n = self.len();
        let mut row = vec![0.0; n];
        self.space.kernel_row(x, &mut row);
        let p = self.space.basis.eval_all(x);
        let c = &self.coefficients[index];
        let k: f64 = row.iter().zip(&c[..n]).map(|(a, b)| a * b).sum();
        let q: f64 = p.iter().zip(&c[n..]).map(|(a, b)| a * b).sum();
        k + q
    }

    /// `chi_index` as a standalone interpolant.
    pub fn function(&self, index: usize) -> Interpolant {
        let n = self.len();
        let c = &self.coefficients[index];
        Interpolant {
            space: Arc::clone(&self.space),
            kernel: c[..n].to_vec(),
            poly: c[n..].to_vec(),
            condition: self.condition,
        }
    }

    /// `I f = sum f(xi) chi_xi` as an interpolant.
    pub fn interpolate(&self, data: &[f64]) -> Result<Interpolant> {
        let n = self.len();
        if data.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: data.len(),
            });
        }
        let size = n + self.space.basis.len();
        let mut acc = vec![0.0; size];
        for (f, c) in data.iter().zip(&self.coefficients) {
            for (a, v) in acc.iter_mut().zip(c) {
                *a += f * v;
            }
        }
        Ok(Interpolant {
            space: Arc::clone(&self.space),
            kernel: acc[..n].to_vec(),
            poly: acc[n..].to_vec(),
            condition: self.condition,
        })
    }
}
