//! Local density parameter: the smallest radius around a point that captures
//! a `K`-stable local polynomial reproduction of degree `l`, together with
//! the growth diagnostics (slow growth, self-majorization, weak
//! quasi-uniformity) and norming-set estimates.

use std::fmt::Write as _;

use nalgebra::{DVector, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{dist, separation, tensor_grid, CenterSet, PointSet};
use crate::interpolation::RANK_TOL;
use crate::kernel::{poly_dim, PolyBasis};
use crate::par;

/// Relative inflation applied to candidate radii.
pub const RADIUS_INFLATION: f64 = 1e-9;
/// Tolerance on the precision (reproduction) residual in the normalized basis.
pub const PRECISION_TOL: f64 = 1e-9;
/// Pairwise growth checks on a field use all centers plus evenly strided
/// probes, at most this many points in total.
pub const MAX_PAIR_SAMPLES: usize = 4096;

/// Degree and stability budget of a local polynomial reproduction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityParams {
    pub degree: usize,
    pub stability: f64,
}

impl DensityParams {
    /// Uses the default budget `K = 4 dim Pi_l`.
    pub fn new(degree: usize, dim: usize) -> Self {
        DensityParams {
            degree,
            stability: default_stability(degree, dim),
        }
    }

    pub fn with_stability(degree: usize, stability: f64) -> Self {
        DensityParams { degree, stability }
    }
}

pub fn default_stability(degree: usize, dim: usize) -> f64 {
    4.0 * poly_dim(degree, dim) as f64
}

/// Weights `a(xi, alpha)` certifying a local polynomial reproduction.
#[derive(Clone, Debug, PartialEq)]
pub struct ReproductionWitness {
    pub alpha: Vec<f64>,
    pub radius: f64,
    pub degree: usize,
    /// Indices of the captured centers.
    pub indices: Vec<usize>,
    pub coefficients: Vec<f64>,
    /// `sum |a|`.
    pub stability: f64,
    /// Largest reproduction error over the normalized basis.
    pub precision_residual: f64,
}

impl ReproductionWitness {
    /// Re-checks Support, Precision and Stability against `centers`.
    pub fn verify(&self, centers: &PointSet, stability_budget: f64) -> std::result::Result<(), String> {
        for &i in &self.indices {
            if dist(centers.point(i), &self.alpha) > self.radius {
                return Err(format!("support: center {i} outside radius {}", self.radius));
            }
        }
        let basis = PolyBasis::new(self.degree, self.alpha.clone(), self.radius).map_err(|e| e.to_string())?;
        let mut acc = vec![0.0; basis.len()];
        for (&i, &a) in self.indices.iter().zip(&self.coefficients) {
            for (s, p) in acc.iter_mut().zip(basis.eval_all(centers.point(i))) {
                *s += a * p;
            }
        }
        let target = basis.eval_all(&self.alpha);
        let residual = acc.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if residual > PRECISION_TOL {
            return Err(format!("precision residual {residual:.3e}"));
        }
        let stab: f64 = self.coefficients.iter().map(|a| a.abs()).sum();
        if stab > stability_budget {
            return Err(format!("stability {stab} exceeds {stability_budget}"));
        }
        Ok(())
    }
}

/// Why a radius failed to support a reproduction.
#[derive(Clone, Debug, PartialEq)]
pub enum Infeasible {
    NotUnisolvent {
        captured: usize,
        rank: usize,
        required: usize,
    },
    Imprecise {
        residual: f64,
    },
    Unstable {
        stability: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Reproduction {
    Feasible(ReproductionWitness),
    Infeasible(Infeasible),
}

/// Minimum-l2-norm local reproduction at `alpha` from the centers within
/// `radius`, accepted if the captured set is `Pi_degree`-unisolvent, the
/// precision residual is below tolerance and `sum |a| <= stability`.
pub fn local_reproduction(
    centers: &PointSet,
    alpha: &[f64],
    degree: usize,
    stability: f64,
    radius: f64,
) -> Result<Reproduction> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if alpha.len() != centers.dim() {
        return Err(Error::DimensionMismatch {
            expected: centers.dim(),
            got: alpha.len(),
        });
    }
    let indices: Vec<usize> = (0..centers.len())
        .filter(|&i| dist(centers.point(i), alpha) <= radius)
        .collect();
    Ok(reproduce_on(centers, alpha, degree, stability, radius, indices))
}

fn reproduce_on(
    centers: &PointSet,
    alpha: &[f64],
    degree: usize,
    stability: f64,
    radius: f64,
    indices: Vec<usize>,
) -> Reproduction {
    let basis = PolyBasis::new(degree, alpha.to_vec(), radius).expect("radius > 0");
    let required = basis.len();
    if indices.len() < required {
        return Reproduction::Infeasible(Infeasible::NotUnisolvent {
            captured: indices.len(),
            rank: indices.len(),
            required,
        });
    }
    let captured = centers.select(&indices);
    let v = basis.vandermonde(&captured).expect("dimension");
    let svd = SVD::new(v.clone(), true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count();
    if rank < required {
        return Reproduction::Infeasible(Infeasible::NotUnisolvent {
            captured: indices.len(),
            rank,
            required,
        });
    }
    // V^T a = p(alpha); minimum-norm a = U S^{-1} W^T p(alpha)
    let target = DVector::from_vec(basis.eval_all(alpha));
    let u = svd.u.as_ref().expect("computed");
    let vt = svd.v_t.as_ref().expect("computed");
    let mut w = vt * &target;
    for (wi, s) in w.iter_mut().zip(svd.singular_values.iter()) {
        *wi /= s;
    }
    let a: DVector<f64> = u * w;
    let recon: DVector<f64> = v.transpose() * &a;
    let precision_residual = (recon - &target).amax();
    if precision_residual > PRECISION_TOL {
        return Reproduction::Infeasible(Infeasible::Imprecise {
            residual: precision_residual,
        });
    }
    let stab: f64 = a.iter().map(|x| x.abs()).sum();
    if stab > stability {
        return Reproduction::Infeasible(Infeasible::Unstable { stability: stab });
    }
    Reproduction::Feasible(ReproductionWitness {
        alpha: alpha.to_vec(),
        radius,
        degree,
        indices,
        coefficients: a.iter().cloned().collect(),
        stability: stab,
        precision_residual,
    })
}

/// Smallest candidate radius at `alpha` admitting a reproduction. Candidates
/// are the positive center distances, inflated by [`RADIUS_INFLATION`].
pub fn minimal_radius(
    centers: &PointSet,
    alpha: &[f64],
    params: DensityParams,
    limit: f64,
) -> Option<ReproductionWitness> {
    let mut order: Vec<(f64, usize)> = centers.iter().enumerate().map(|(i, c)| (dist(c, alpha), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let need = poly_dim(params.degree, centers.dim());
    let mut k = 0;
    while k < order.len() {
        let r = order[k].0 * (1.0 + RADIUS_INFLATION);
        // include every center captured at this radius
        let mut end = k + 1;
        while end < order.len() && order[end].0 <= r {
            end += 1;
        }
        if r > limit * (1.0 + RADIUS_INFLATION) {
            return None;
        }
        if r > 0.0 && end >= need {
            let indices: Vec<usize> = order[..end].iter().map(|&(_, i)| i).collect();
            if let Reproduction::Feasible(w) = reproduce_on(centers, alpha, params.degree, params.stability, r, indices)
            {
                return Some(w);
            }
        }
        k = end;
    }
    None
}

/// Growth diagnostics of a sampled density field.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityDiagnostics {
    /// Largest slow-growth exponent passing on all sampled pairs (multiple of
    /// 1e-3), or `None` when no positive exponent passes.
    pub epsilon: Option<f64>,
    /// `1 / epsilon - 1`.
    pub tau: Option<f64>,
    /// Fitted self-majorization constant at `tau`.
    pub c_sm: Option<f64>,
    /// Weak quasi-uniformity ratio `max rho(xi) / q(xi)` and its center.
    pub c0: f64,
    pub c0_center: usize,
}

/// `rho` sampled at the centers followed by extra probe points.
#[derive(Clone, Debug)]
pub struct DensityField {
    centers: PointSet,
    params: DensityParams,
    points: PointSet,
    rho: Vec<f64>,
    witnesses: Vec<ReproductionWitness>,
    diagnostics: DensityDiagnostics,
    sample: Vec<usize>,
}

/// Indices of the points entering pairwise checks: every center, then every
/// `k`-th probe so that at most [`MAX_PAIR_SAMPLES`] points are used.
fn pair_sample(centers: usize, total: usize) -> Vec<usize> {
    let probes = total - centers;
    let room = MAX_PAIR_SAMPLES.saturating_sub(centers).max(1);
    let stride = probes.div_ceil(room).max(1);
    (0..centers).chain((centers..total).step_by(stride)).collect()
}

impl DensityField {
    /// Evaluates `rho` at every center and then at each of `probes`.
    pub fn compute(centers: &CenterSet, params: DensityParams, probes: &PointSet) -> Result<Self> {
        Self::compute_points(centers.points(), centers.domain().r1(), params, probes)
    }

    /// As [`DensityField::compute`] for a bare point set, searching radii up
    /// to `limit`.
    pub fn compute_points(centers: &PointSet, limit: f64, params: DensityParams, probes: &PointSet) -> Result<Self> {
        if centers.len() < 2 {
            return Err(Error::SeparationUndefined);
        }
        let mut points = centers.clone();
        points.extend(probes);
        let found = par::map_indexed(points.len(), |i| {
            minimal_radius(centers, points.point(i), params, limit)
        });
        let mut witnesses = Vec::with_capacity(found.len());
        for (index, w) in found.into_iter().enumerate() {
            match w {
                Some(w) => witnesses.push(w),
                None => {
                    return Err(Error::NoFeasibleRadius {
                        index,
                        point: points.point(index).to_vec(),
                        limit,
                    })
                }
            }
        }
        let rho: Vec<f64> = witnesses.iter().map(|w| w.radius).collect();
        let sample = pair_sample(centers.len(), points.len());
        let diagnostics = diagnose(
            centers,
            &points.select(&sample),
            &sample.iter().map(|&i| rho[i]).collect::<Vec<_>>(),
        )?;
        Ok(DensityField {
            centers: centers.clone(),
            params,
            points,
            rho,
            witnesses,
            diagnostics,
            sample,
        })
    }

    pub fn params(&self) -> DensityParams {
        self.params
    }

    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    /// All sample points: centers first, then probes.
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn rho_at_centers(&self) -> &[f64] {
        &self.rho[..self.centers.len()]
    }

    pub fn rho_at_probes(&self) -> &[f64] {
        &self.rho[self.centers.len()..]
    }

    pub fn witnesses(&self) -> &[ReproductionWitness] {
        &self.witnesses
    }

    pub fn diagnostics(&self) -> &DensityDiagnostics {
        &self.diagnostics
    }

    /// `rho` at each point of `grid`, matched by exact coordinates.
    pub fn rho_on(&self, grid: &PointSet) -> Result<Vec<f64>> {
        use std::collections::HashMap;
        let key = |p: &[f64]| p.iter().map(|v| v.to_bits()).collect::<Vec<u64>>();
        let mut lookup: HashMap<Vec<u64>, f64> = HashMap::new();
        for (p, r) in self.points.iter().zip(&self.rho) {
            lookup.entry(key(p)).or_insert(*r);
        }
        grid.iter()
            .enumerate()
            .map(|(index, p)| lookup.get(&key(p)).copied().ok_or(Error::MissingRho { index }))
            .collect()
    }

    /// Indices of the points used by the pairwise growth checks.
    pub fn pair_sample(&self) -> &[usize] {
        &self.sample
    }

    fn sampled(&self) -> (PointSet, Vec<f64>) {
        (
            self.points.select(&self.sample),
            self.sample.iter().map(|&i| self.rho[i]).collect(),
        )
    }

    fn remap(&self, mut check: PairCheck) -> PairCheck {
        for p in &mut check.pairs {
            *p = (self.sample[p.0], self.sample[p.1]);
        }
        check
    }

    /// Slow growth on the sampled pairs; pair indices refer to [`Self::points`].
    pub fn check_slow_growth(&self, epsilon: f64) -> PairCheck {
        let (pts, rho) = self.sampled();
        self.remap(check_slow_growth(&pts, &rho, epsilon))
    }

    pub fn check_self_majorization(&self, tau: f64, c_sm: f64) -> PairCheck {
        let (pts, rho) = self.sampled();
        self.remap(check_self_majorization(&pts, &rho, tau, c_sm))
    }

    pub fn weak_quasi_uniformity(&self) -> (f64, usize) {
        (self.diagnostics.c0, self.diagnostics.c0_center)
    }

    /// CSV table: coordinates, `rho`, witness stability and a center flag.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let d = self.points.dim();
        let names: Vec<String> = (0..d).map(|k| format!("x{k}")).collect();
        writeln!(s, "{},rho,stability,is_center", names.join(",")).unwrap();
        for (i, p) in self.points.iter().enumerate() {
            let coords: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(
                s,
                "{},{:.16e},{:.16e},{}",
                coords.join(","),
                self.rho[i],
                self.witnesses[i].stability,
                u8::from(i < self.centers.len())
            )
            .unwrap();
        }
        s
    }

    /// `key = value` lines with the growth diagnostics; `bulk_gamma` is
    /// included when `r0` is given and a slow-growth exponent was found.
    pub fn diagnostics_text(&self, r0: Option<f64>) -> String {
        let mut s = String::new();
        let dg = &self.diagnostics;
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.16e}"));
        writeln!(s, "degree = {}", self.params.degree).unwrap();
        writeln!(s, "stability_budget = {:.16e}", self.params.stability).unwrap();
        writeln!(s, "epsilon_star = {}", opt(dg.epsilon)).unwrap();
        writeln!(s, "tau = {}", opt(dg.tau)).unwrap();
        writeln!(s, "c_sm = {}", opt(dg.c_sm)).unwrap();
        writeln!(s, "c0 = {:.16e}", dg.c0).unwrap();
        writeln!(s, "c0_center = {}", dg.c0_center).unwrap();
        if let (Some(r0), Some(eps)) = (r0, dg.epsilon) {
            writeln!(s, "bulk_gamma = {}", opt(bulk_gamma(eps, r0))).unwrap();
        }
        writeln!(s, "samples = {}", self.points.len()).unwrap();
        writeln!(s, "pair_samples = {}", self.sample.len()).unwrap();
        writeln!(s, "centers = {}", self.centers.len()).unwrap();
        s
    }
}

/// The small-density threshold `(eps r0^-eps)^(1/(1-eps))` of the bulk
/// decay estimate; recorded, never enforced.
pub fn bulk_gamma(epsilon: f64, r0: f64) -> Option<f64> {
    if epsilon >= 1.0 || epsilon <= 0.0 {
        return None;
    }
    Some((epsilon * r0.powf(-epsilon)).powf(1.0 / (1.0 - epsilon)))
}

fn diagnose(centers: &PointSet, points: &PointSet, rho: &[f64]) -> Result<DensityDiagnostics> {
    let epsilon = fit_slow_growth(points, rho);
    let tau = epsilon.map(|e| 1.0 / e - 1.0);
    let c_sm = tau.map(|t| fit_self_majorization(points, rho, t));
    let q = separation(centers)?;
    let (c0, c0_center) = weak_quasi_uniformity(&rho[..centers.len()], &q);
    Ok(DensityDiagnostics {
        epsilon,
        tau,
        c_sm,
        c0,
        c0_center,
    })
}

/// Violations found by a pairwise check.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    /// Total number of violating ordered pairs.
    pub count: usize,
    /// The first violating pairs `(x index, alpha/y index)`, at most 1000.
    pub pairs: Vec<(usize, usize)>,
}

impl PairCheck {
    pub fn passed(&self) -> bool {
        self.count == 0
    }
}

const MAX_REPORTED_PAIRS: usize = 1000;

fn pair_check<F: Fn(usize, usize) -> bool + Sync>(n: usize, violates: F) -> PairCheck {
    let per_row = par::map_indexed(n, |i| {
        (0..n).filter(|&j| violates(i, j)).map(|j| (i, j)).collect::<Vec<_>>()
    });
    let count = per_row.iter().map(Vec::len).sum();
    let pairs = per_row.into_iter().flatten().take(MAX_REPORTED_PAIRS).collect();
    PairCheck { count, pairs }
}

/// Slow growth: `rho(alpha) <= rho(x) (1 + |x - alpha| / rho(x))^(1 - eps)` on
/// every ordered pair `(x, alpha)` of samples.
pub fn check_slow_growth(points: &PointSet, rho: &[f64], epsilon: f64) -> PairCheck {
    pair_check(points.len(), |i, j| {
        let u = dist(points.point(i), points.point(j)) / rho[i];
        rho[j] > rho[i] * (1.0 + u).powf(1.0 - epsilon)
    })
}

/// Self-majorization: `rho(y) >= C rho(x) (1 + |x - y| / rho(x))^(-tau)` on
/// every ordered pair `(x, y)` of samples.
pub fn check_self_majorization(points: &PointSet, rho: &[f64], tau: f64, c_sm: f64) -> PairCheck {
    pair_check(points.len(), |i, j| {
        let u = dist(points.point(i), points.point(j)) / rho[i];
        rho[j] < c_sm * rho[i] * (1.0 + u).powf(-tau)
    })
}

/// Largest `eps` in (0, 1] for which slow growth holds on all sampled pairs,
/// rounded down to a multiple of 1e-3.
pub fn fit_slow_growth(points: &PointSet, rho: &[f64]) -> Option<f64> {
    let n = points.len();
    // per pair the condition is eps <= 1 - ln(rho_a / rho_x) / ln(1 + u)
    let per_row = par::map_indexed(n, |i| {
        (0..n)
            .filter(|&j| rho[j] > rho[i])
            .map(|j| {
                let u = dist(points.point(i), points.point(j)) / rho[i];
                if u == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    1.0 - (rho[j] / rho[i]).ln() / u.ln_1p()
                }
            })
            .fold(1.0, f64::min)
    });
    let bound = per_row.into_iter().fold(1.0, f64::min);
    let mut eps = (bound * 1000.0).floor() / 1000.0;
    // guard rounding at the boundary
    while eps > 0.0 && !check_slow_growth(points, rho, eps).passed() {
        eps -= 1e-3;
    }
    (eps > 0.0).then_some(eps)
}

/// Largest constant `C_sm` for which self-majorization of order `tau` holds on
/// all sampled pairs; at most 1 because `x = y` is a pair.
pub fn fit_self_majorization(points: &PointSet, rho: &[f64], tau: f64) -> f64 {
    let n = points.len();
    let per_row = par::map_indexed(n, |i| {
        (0..n)
            .map(|j| {
                let u = dist(points.point(i), points.point(j)) / rho[i];
                rho[j] / (rho[i] * (1.0 + u).powf(-tau))
            })
            .fold(f64::INFINITY, f64::min)
    });
    per_row.into_iter().fold(f64::INFINITY, f64::min)
}

/// `max rho(xi) / q(xi)` and the first center attaining it.
pub fn weak_quasi_uniformity(rho_at_centers: &[f64], separation: &[f64]) -> (f64, usize) {
    rho_at_centers
        .iter()
        .zip(separation)
        .map(|(r, q)| r / q)
        .enumerate()
        .fold(
            (f64::NEG_INFINITY, 0),
            |best, (i, v)| if v > best.0 { (v, i) } else { best },
        )
}

/// Result of a norming-constant estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct NormingEstimate {
    /// Lower bound on the norming constant; infinite when the set is not unisolvent.
    pub kappa: f64,
    pub degree: usize,
    /// Probe points per axis over the ball's bounding box.
    pub grid_resolution: usize,
    pub trials: usize,
}

/// Estimates the norming constant of `set` for `Pi_degree` on the ball
/// `B(center, radius)`, as the largest observed `||p||_B / ||p|_set||_inf`
/// over random polynomials and sign-pattern extremal candidates. The sup over
/// the ball is taken on a probe grid, so the result is a lower bound.
pub fn estimate_norming_constant(
    set: &PointSet,
    center: &[f64],
    radius: f64,
    degree: usize,
    trials: usize,
    seed: u64,
    grid_resolution: usize,
) -> Result<NormingEstimate> {
    if !(radius > 0.0) || center.len() != set.dim() {
        return Err(Error::InvalidArgument(
            "norming ball needs a positive radius and matching dimension".into(),
        ));
    }
    let d = set.dim();
    let basis = PolyBasis::new(degree, center.to_vec(), radius)?;
    let m = basis.len();
    let report = |kappa| NormingEstimate {
        kappa,
        degree,
        grid_resolution,
        trials,
    };
    if set.len() < m {
        return Ok(report(f64::INFINITY));
    }
    let v = basis.vandermonde(set)?;
    let svd = SVD::new(v.clone(), true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count() < m {
        return Ok(report(f64::INFINITY));
    }
    let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
    let mut probes = PointSet::new(d);
    for p in tensor_grid(&lo, &hi, grid_resolution.max(2)).iter() {
        if dist(p, center) <= radius * (1.0 + 1e-12) {
            probes.push(p)?;
        }
    }
    let probe_v = basis.vandermonde(&probes)?;
    let ratio = |coef: &DVector<f64>| -> f64 {
        let on_set = (&v * coef).amax();
        let on_ball = (&probe_v * coef).amax();
        if on_set == 0.0 {
            f64::INFINITY
        } else {
            on_ball / on_set
        }
    };
    let mut kappa: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let c = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
        kappa = kappa.max(ratio(&c));
    }
    // extremal candidates: least-squares fit of the sign pattern of the
    // minimum-norm reproduction weights at each probe point
    let pinv = svd
        .pseudo_inverse(RANK_TOL * smax)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    for row in 0..probes.len() {
        let target = probe_v.row(row).transpose();
        // weights w with V^T w = p(y): w = pinv(V)^T p(y)
        let w = pinv.transpose() * &target;
        let signs = w.map(|x| if x >= 0.0 { 1.0 } else { -1.0 });
        let coef = &pinv * signs;
        kappa = kappa.max(ratio(&coef));
    }
    Ok(report(kappa))
}

/// Worst norming estimate for `Pi_{degree - 1}` over the subsets obtained by
/// removing one point from `set`.
pub fn leave_one_out_norming(
    set: &PointSet,
    center: &[f64],
    radius: f64,
    degree: usize,
    trials: usize,
    seed: u64,
    grid_resolution: usize,
) -> Result<NormingEstimate> {
    if degree == 0 {
        return Err(Error::InvalidArgument("leave-one-out norming needs degree >= 1".into()));
    }
    let mut worst = NormingEstimate {
        kappa: 0.0,
        degree: degree - 1,
        grid_resolution,
        trials,
    };
    for skip in 0..set.len() {
        let keep: Vec<usize> = (0..set.len()).filter(|&i| i != skip).collect();
        let sub = set.select(&keep);
        let est = estimate_norming_constant(&sub, center, radius, degree - 1, trials, seed, grid_resolution)?;
        worst.kappa = worst.kappa.max(est.kappa);
    }
    Ok(worst)
}
