//! Domains, center sets, point generators and spacing diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::poly_dim;

/// Default duplicate tolerance relative to the domain diameter.
pub const DEFAULT_DEDUPE_TOL: f64 = 1e-12;

/// Default probe resolution per axis for [`fill_distance`].
pub const DEFAULT_PROBE_RESOLUTION: usize = 64;

/// A flat list of points in `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        PointSet {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len(),
            });
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut set = PointSet::new(dim);
        for r in rows {
            set.push(r)?;
        }
        Ok(set)
    }

    /// One-dimensional point set from scalar positions.
    pub fn line(xs: &[f64]) -> Self {
        PointSet {
            dim: 1,
            coords: xs.to_vec(),
        }
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Applies `x -> scale * x + shift` to every point.
    pub fn affine(&self, scale: f64, shift: &[f64]) -> PointSet {
        assert_eq!(shift.len(), self.dim);
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(k, &c)| scale * c + shift[k % self.dim])
            .collect();
        PointSet { dim: self.dim, coords }
    }

    pub fn extend(&mut self, other: &PointSet) {
        assert_eq!(self.dim, other.dim);
        self.coords.extend_from_slice(&other.coords);
    }

    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut out = PointSet::new(self.dim);
        for &i in indices {
            out.coords.extend_from_slice(self.point(i));
        }
        out
    }

    pub fn centroid(&self) -> Vec<f64> {
        let n = self.len().max(1) as f64;
        let mut c = vec![0.0; self.dim];
        for p in self.iter() {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        c.iter_mut().for_each(|v| *v /= n);
        c
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Bounding region of a domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Bounds {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

/// The interpolation domain together with its diameter `r1` and the support
/// margin `r0` separating target-function supports from the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    bounds: Bounds,
    r0: f64,
}

impl Domain {
    pub fn new(bounds: Bounds, r0: f64) -> Result<Self> {
        match &bounds {
            Bounds::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidDomain("box corners differ in dimension".into()));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
                    return Err(Error::InvalidDomain("box must have positive extent".into()));
                }
            }
            Bounds::Ball { center, radius } => {
                if center.is_empty() || !(*radius > 0.0) {
                    return Err(Error::InvalidDomain("ball needs a center and radius > 0".into()));
                }
            }
        }
        let domain = Domain { bounds, r0 };
        let r1 = domain.r1();
        if !(r0 > 0.0 && r0 < r1) {
            return Err(Error::InvalidDomain(format!(
                "support margin r0 = {r0} must satisfy 0 < r0 < r1 = {r1}"
            )));
        }
        let support_ok = match &domain.bounds {
            Bounds::Box { lo, hi } => lo.iter().zip(hi).all(|(a, b)| b - a > 2.0 * r0),
            Bounds::Ball { radius, .. } => *radius > r0,
        };
        if !support_ok {
            return Err(Error::InvalidDomain("support region is empty".into()));
        }
        Ok(domain)
    }

    pub fn unit_box(dim: usize, r0: f64) -> Result<Self> {
        Domain::new(
            Bounds::Box {
                lo: vec![0.0; dim],
                hi: vec![1.0; dim],
            },
            r0,
        )
    }

    pub fn interval(lo: f64, hi: f64, r0: f64) -> Result<Self> {
        Domain::new(
            Bounds::Box {
                lo: vec![lo],
                hi: vec![hi],
            },
            r0,
        )
    }

    /// Bounding box of `points` padded by 5% of its diagonal on every side,
    /// with `r0` set to 2.5% of the padded diameter.
    pub fn enclosing(points: &PointSet) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCenters);
        }
        let (mut lo, mut hi) = points.bounds();
        let diag = dist(&lo, &hi).max(1e-300);
        let pad = if diag > 1e-300 { 0.05 * diag } else { 0.5 };
        lo.iter_mut().for_each(|v| *v -= pad);
        hi.iter_mut().for_each(|v| *v += pad);
        let r1 = dist(&lo, &hi);
        Domain::new(Bounds::Box { lo, hi }, 0.025 * r1)
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        match &self.bounds {
            Bounds::Box { lo, .. } => lo.len(),
            Bounds::Ball { center, .. } => center.len(),
        }
    }

    /// Diameter of the domain.
    pub fn r1(&self) -> f64 {
        match &self.bounds {
            Bounds::Box { lo, hi } => dist(lo, hi),
            Bounds::Ball { radius, .. } => 2.0 * radius,
        }
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn with_r0(&self, r0: f64) -> Result<Self> {
        Domain::new(self.bounds.clone(), r0)
    }

    pub fn centroid(&self) -> Vec<f64> {
        match &self.bounds {
            Bounds::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            Bounds::Ball { center, .. } => center.clone(),
        }
    }

    fn slack(&self) -> f64 {
        1e-12 * self.r1()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let eps = self.slack();
        match &self.bounds {
            Bounds::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *v >= a - eps && *v <= b + eps),
            Bounds::Ball { center, radius } => dist(x, center) <= radius + eps,
        }
    }

    /// Membership in the domain shrunk by `r0`.
    pub fn in_support(&self, x: &[f64]) -> bool {
        let eps = self.slack();
        match &self.bounds {
            Bounds::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *v >= a + self.r0 - eps && *v <= b - self.r0 + eps),
            Bounds::Ball { center, radius } => dist(x, center) <= radius - self.r0 + eps,
        }
    }

    /// Distance from `from` to the boundary along the unit direction `dir`.
    fn ray_exit(&self, from: &[f64], dir: &[f64]) -> f64 {
        match &self.bounds {
            Bounds::Box { lo, hi } => {
                let mut t = f64::INFINITY;
                for k in 0..from.len() {
                    if dir[k] > 0.0 {
                        t = t.min((hi[k] - from[k]) / dir[k]);
                    } else if dir[k] < 0.0 {
                        t = t.min((lo[k] - from[k]) / dir[k]);
                    }
                }
                t.max(0.0)
            }
            Bounds::Ball { center, radius } => {
                let w: Vec<f64> = from.iter().zip(center).map(|(a, c)| a - c).collect();
                let b: f64 = w.iter().zip(dir).map(|(a, d)| a * d).sum();
                let c = w.iter().map(|a| a * a).sum::<f64>() - radius * radius;
                let disc = (b * b - c).max(0.0);
                (-b + disc.sqrt()).max(0.0)
            }
        }
    }

    /// Tensor probe grid with `resolution` points per axis over the bounding
    /// box, restricted to the domain.
    pub fn probe_grid(&self, resolution: usize) -> PointSet {
        let res = resolution.max(2);
        let (lo, hi) = match &self.bounds {
            Bounds::Box { lo, hi } => (lo.clone(), hi.clone()),
            Bounds::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        };
        let grid = tensor_grid(&lo, &hi, res);
        let mut out = PointSet::new(self.dim());
        for p in grid.iter() {
            if self.contains(p) {
                out.push(p).expect("dimension");
            }
        }
        out
    }
}

/// Uniform tensor grid with `per_axis` points including both endpoints.
pub fn tensor_grid(lo: &[f64], hi: &[f64], per_axis: usize) -> PointSet {
    let d = lo.len();
    let n = per_axis.max(1);
    let total = n.pow(d as u32);
    let mut out = PointSet::new(d);
    let mut p = vec![0.0; d];
    for idx in 0..total {
        let mut rem = idx;
        for k in 0..d {
            let i = rem % n;
            rem /= n;
            p[k] = if n == 1 {
                0.5 * (lo[k] + hi[k])
            } else {
                lo[k] + (hi[k] - lo[k]) * (i as f64) / ((n - 1) as f64)
            };
        }
        out.push(&p).expect("dimension");
    }
    out
}

/// A validated set of interpolation centers inside a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterSet {
    points: PointSet,
    domain: Domain,
    dedupe_tol: f64,
}

impl CenterSet {
    pub fn new(domain: Domain, points: PointSet) -> Result<Self> {
        Self::with_tolerance(domain, points, DEFAULT_DEDUPE_TOL)
    }

    pub fn with_tolerance(domain: Domain, points: PointSet, dedupe_tol: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCenters);
        }
        if points.dim() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: points.dim(),
            });
        }
        if let Some(index) = points.iter().position(|p| !domain.contains(p)) {
            return Err(Error::OutsideDomain { index });
        }
        let tol = dedupe_tol * domain.r1();
        if let Some((first, second)) = find_duplicate(&points, tol) {
            return Err(Error::DuplicateCenters { first, second });
        }
        if !points.iter().any(|p| domain.in_support(p)) {
            return Err(Error::EmptySupport);
        }
        Ok(CenterSet {
            points,
            domain,
            dedupe_tol,
        })
    }

    /// Centers inside a padded bounding box of themselves (see [`Domain::enclosing`]).
    pub fn from_points(points: PointSet) -> Result<Self> {
        let domain = Domain::enclosing(&points)?;
        CenterSet::new(domain, points)
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dedupe_tol(&self) -> f64 {
        self.dedupe_tol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Indices of centers in the support region (the set `Xi_f`).
    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.domain.in_support(self.points.point(i)))
            .collect()
    }
}

fn find_duplicate(points: &PointSet, tol: f64) -> Option<(usize, usize)> {
    let tol2 = tol * tol;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if dist2(points.point(i), points.point(j)) <= tol2 {
                return Some((i, j));
            }
        }
    }
    None
}

/// Removes every point closer than `tol` to an earlier one.
pub fn dedupe(points: &PointSet, tol: f64) -> PointSet {
    let tol2 = tol * tol;
    let mut out = PointSet::new(points.dim());
    for p in points.iter() {
        if !out.iter().any(|q| dist2(p, q) <= tol2) {
            out.push(p).expect("dimension");
        }
    }
    out
}

/// Separation distance `q(xi)`: distance from each point to its nearest
/// neighbour in the set.
pub fn separation(points: &PointSet) -> Result<Vec<f64>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::SeparationUndefined);
    }
    // Sweep over points sorted by the first coordinate; candidates further
    // away along that axis than the current best cannot improve it.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points.point(a)[0].total_cmp(&points.point(b)[0]));
    let mut q = vec![f64::INFINITY; n];
    for (pos, &i) in order.iter().enumerate() {
        let xi = points.point(i);
        let mut best2 = f64::INFINITY;
        for &j in order[pos + 1..].iter() {
            let dx = points.point(j)[0] - xi[0];
            if dx * dx >= best2 {
                break;
            }
            best2 = best2.min(dist2(xi, points.point(j)));
        }
        for &j in order[..pos].iter().rev() {
            let dx = xi[0] - points.point(j)[0];
            if dx * dx >= best2 {
                break;
            }
            best2 = best2.min(dist2(xi, points.point(j)));
        }
        q[i] = best2.sqrt();
    }
    Ok(q)
}

/// Fill distance estimated on a probe grid: the largest distance from a probe
/// point to its nearest center. This under-approximates the true supremum by
/// at most half the probe grid diagonal spacing.
pub fn fill_distance(centers: &CenterSet, probe_resolution: usize) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    let probes = centers.domain().probe_grid(probe_resolution);
    let pts = centers.points();
    let per_probe = crate::par::map_indexed(probes.len(), |i| {
        let x = probes.point(i);
        pts.iter().map(|c| dist2(x, c)).fold(f64::INFINITY, f64::min)
    });
    Ok(per_probe.into_iter().fold(0.0, f64::max).sqrt())
}

/// Point generator descriptors.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    /// Tensor grid with `per_axis` points per axis (restricted to the domain).
    UniformGrid { per_axis: usize },
    /// First `n` Halton points (skipping `seed` leading points), mapped into the domain.
    LowDiscrepancy { n: usize },
    /// Radially graded set: a uniform base set pushed towards `focus` by
    /// `x = f + (u - f) (|u - f| / D(dir))^(g - 1)`, with `D(dir)` the distance
    /// from the focus to the boundary along the ray. Near the focus the
    /// spacing behaves like `dist^(1 - 1/g)`.
    Graded { n: usize, exponent: f64, focus: Vec<f64> },
    /// Half of the points from a low-discrepancy background, the rest spread
    /// uniformly over `clusters` balls of radius `radius`.
    Clustered { n: usize, clusters: usize, radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterGenerator {
    pub kind: GeneratorKind,
    /// Generated sets must hold at least `dim Pi_degree` points.
    pub unisolvent_degree: usize,
}

impl CenterGenerator {
    pub fn new(kind: GeneratorKind) -> Self {
        CenterGenerator {
            kind,
            unisolvent_degree: 1,
        }
    }
}

/// Deterministically generates a center set for `(spec, seed)`.
pub fn generate_centers(domain: &Domain, spec: &CenterGenerator, seed: u64) -> Result<CenterSet> {
    let d = domain.dim();
    let raw = match &spec.kind {
        GeneratorKind::UniformGrid { per_axis } => {
            if *per_axis < 1 {
                return Err(Error::InvalidGenerator("grid needs at least one point per axis".into()));
            }
            let (lo, hi) = box_of(domain);
            let g = tensor_grid(&lo, &hi, *per_axis);
            filter_inside(domain, &g)
        }
        GeneratorKind::LowDiscrepancy { n } => halton_in(domain, *n, seed),
        GeneratorKind::Graded { n, exponent, focus } => {
            if !(*exponent > 0.0) {
                return Err(Error::InvalidGenerator(format!(
                    "grading exponent must be positive, got {exponent}"
                )));
            }
            if focus.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: focus.len(),
                });
            }
            if !domain.contains(focus) {
                return Err(Error::InvalidGenerator("grading focus outside the domain".into()));
            }
            let base = if d == 1 {
                let (lo, hi) = box_of(domain);
                tensor_grid(&lo, &hi, *n)
            } else {
                halton_in(domain, *n, seed)
            };
            grade(domain, &base, *exponent, focus)
        }
        GeneratorKind::Clustered { n, clusters, radius } => {
            if *clusters == 0 || !(*radius > 0.0) {
                return Err(Error::InvalidGenerator(
                    "clustered sets need at least one cluster and a positive radius".into(),
                ));
            }
            clustered(domain, *n, *clusters, *radius, seed)
        }
    };
    let pts = dedupe(&raw, DEFAULT_DEDUPE_TOL * domain.r1());
    let need = poly_dim(spec.unisolvent_degree, d);
    if pts.len() < need {
        return Err(Error::InvalidGenerator(format!(
            "{} points cannot be unisolvent for degree {} (need {need})",
            pts.len(),
            spec.unisolvent_degree
        )));
    }
    CenterSet::new(domain.clone(), pts)
}

fn box_of(domain: &Domain) -> (Vec<f64>, Vec<f64>) {
    match domain.bounds() {
        Bounds::Box { lo, hi } => (lo.clone(), hi.clone()),
        Bounds::Ball { center, radius } => (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
        ),
    }
}

fn filter_inside(domain: &Domain, pts: &PointSet) -> PointSet {
    let mut out = PointSet::new(pts.dim());
    for p in pts.iter().filter(|p| domain.contains(p)) {
        out.push(p).expect("dimension");
    }
    out
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

fn halton_in(domain: &Domain, n: usize, seed: u64) -> PointSet {
    let d = domain.dim();
    assert!(d <= PRIMES.len(), "Halton generator supports d <= 12");
    let (lo, hi) = box_of(domain);
    let mut out = PointSet::new(d);
    let mut index = seed + 1;
    let mut p = vec![0.0; d];
    while out.len() < n {
        for k in 0..d {
            p[k] = lo[k] + (hi[k] - lo[k]) * radical_inverse(index, PRIMES[k]);
        }
        index += 1;
        if domain.contains(&p) {
            out.push(&p).expect("dimension");
        }
    }
    out
}

fn grade(domain: &Domain, base: &PointSet, g: f64, focus: &[f64]) -> PointSet {
    let mut out = PointSet::new(base.dim());
    let mut x = vec![0.0; base.dim()];
    for u in base.iter() {
        let r = dist(u, focus);
        if r == 0.0 {
            out.push(focus).expect("dimension");
            continue;
        }
        let dir: Vec<f64> = u.iter().zip(focus).map(|(a, f)| (a - f) / r).collect();
        let reach = domain.ray_exit(focus, &dir);
        let t = if reach > 0.0 { (r / reach).min(1.0) } else { 0.0 };
        let new_r = reach * t.powf(g);
        for k in 0..x.len() {
            x[k] = focus[k] + dir[k] * new_r;
        }
        out.push(&x).expect("dimension");
    }
    out
}

fn clustered(domain: &Domain, n: usize, clusters: usize, radius: f64, seed: u64) -> PointSet {
    let d = domain.dim();
    let background = n / 2;
    let mut out = halton_in(domain, background, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = box_of(domain);
    let mut cluster_centers = Vec::with_capacity(clusters);
    while cluster_centers.len() < clusters {
        let c: Vec<f64> = (0..d).map(|k| rng.gen_range(lo[k]..=hi[k])).collect();
        if domain.in_support(&c) {
            cluster_centers.push(c);
        }
    }
    let mut k = 0;
    while out.len() < n {
        let c = &cluster_centers[k % clusters];
        let offset: Vec<f64> = loop {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            if v.iter().map(|a| a * a).sum::<f64>() <= 1.0 {
                break v;
            }
        };
        let p: Vec<f64> = c.iter().zip(&offset).map(|(a, o)| a + radius * o).collect();
        if domain.contains(&p) {
            out.push(&p).expect("dimension");
            k += 1;
        }
    }
    out
}

/// Region used for localized seminorms.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Open ball `B(center, radius)`.
    Ball { center: Vec<f64>, radius: f64 },
    /// `B(center, truncation) \ B(center, radius)`, standing in for the
    /// unbounded complement.
    Complement {
        center: Vec<f64>,
        radius: f64,
        truncation: f64,
    },
    /// `B(center, radius) \ B(center, radius - width)`.
    Annulus { center: Vec<f64>, radius: f64, width: f64 },
}

impl Region {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let r = Region::Ball { center, radius };
        r.validate()?;
        Ok(r)
    }

    pub fn complement(center: Vec<f64>, radius: f64, truncation: f64) -> Result<Self> {
        let r = Region::Complement {
            center,
            radius,
            truncation,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn annulus(center: Vec<f64>, radius: f64, width: f64) -> Result<Self> {
        let r = Region::Annulus { center, radius, width };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Region::Ball { radius, .. } if *radius > 0.0 => Ok(()),
            Region::Complement { radius, truncation, .. } if *radius >= 0.0 && truncation > radius => Ok(()),
            Region::Annulus { radius, width, .. } if *radius > 0.0 && *width > 0.0 && width <= radius => Ok(()),
            _ => Err(Error::InvalidArgument(format!("invalid region {self:?}"))),
        }
    }

    pub fn center(&self) -> &[f64] {
        match self {
            Region::Ball { center, .. } | Region::Complement { center, .. } | Region::Annulus { center, .. } => center,
        }
    }

    /// Radial extent `(inner, outer)` about the region's center.
    pub fn radial_extent(&self) -> (f64, f64) {
        match self {
            Region::Ball { radius, .. } => (0.0, *radius),
            Region::Complement { radius, truncation, .. } => (*radius, *truncation),
            Region::Annulus { radius, width, .. } => (radius - width, *radius),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_separation(p: &PointSet) -> Vec<f64> {
        (0..p.len())
            .map(|i| {
                (0..p.len())
                    .filter(|&j| j != i)
                    .map(|j| dist(p.point(i), p.point(j)))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn separation_small_cases() {
        assert_eq!(
            separation(&PointSet::line(&[0.0, 1.0, 3.0])).unwrap(),
            vec![1.0, 1.0, 2.0]
        );
        let p = PointSet::from_rows(2, &[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(separation(&p).unwrap(), vec![1.0, 1.0]);
        assert!(matches!(
            separation(&PointSet::line(&[0.5])),
            Err(Error::SeparationUndefined)
        ));
    }

    #[test]
    fn separation_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut p = PointSet::new(2);
        for _ in 0..100 {
            p.push(&[rng.gen::<f64>(), rng.gen::<f64>()]).unwrap();
        }
        assert_eq!(separation(&p).unwrap(), brute_separation(&p));
    }

    #[test]
    fn fill_distance_uniform_interval() {
        let domain = Domain::unit_box(1, 0.1).unwrap();
        let xs: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let c = CenterSet::new(domain, PointSet::line(&xs)).unwrap();
        // 201 probes put probes exactly on the midpoints.
        let h = fill_distance(&c, 201).unwrap();
        assert!((h - 0.05).abs() < 1e-12, "h = {h}");
        let h64 = fill_distance(&c, 64).unwrap();
        assert!(h64 <= 0.05 + 1e-12 && h64 > 0.05 - 1.0 / 63.0);
    }

    #[test]
    fn fill_distance_single_center() {
        let domain = Domain::unit_box(2, 0.1).unwrap();
        let c = CenterSet::new(domain, PointSet::from_rows(2, &[vec![0.5, 0.5]]).unwrap()).unwrap();
        let h = fill_distance(&c, 64).unwrap();
        assert!((h - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fill_distance_graded_matches_finer_grid() {
        let domain = Domain::unit_box(1, 0.05).unwrap();
        let xs: Vec<f64> = (0..15)
            .map(|i| 0.5 - 0.5 * (std::f64::consts::PI * i as f64 / 14.0).cos())
            .collect();
        let c = CenterSet::new(domain, PointSet::line(&xs)).unwrap();
        let h = fill_distance(&c, 1000).unwrap();
        // oracle: 10x finer probe grid, brute force
        let fine = 10_000;
        let oracle = (0..=fine)
            .map(|i| {
                let x = i as f64 / fine as f64;
                xs.iter().map(|c| (x - c).abs()).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        assert!((h - oracle).abs() <= 0.01 * oracle, "{h} vs {oracle}");
    }

    #[test]
    fn uniform_grid_generator() {
        let domain = Domain::unit_box(1, 0.1).unwrap();
        let c = generate_centers(
            &domain,
            &CenterGenerator::new(GeneratorKind::UniformGrid { per_axis: 3 }),
            0,
        )
        .unwrap();
        assert_eq!(c.points().as_flat(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn graded_generator_gaps_increase() {
        let domain = Domain::unit_box(1, 0.1).unwrap();
        let spec = CenterGenerator::new(GeneratorKind::Graded {
            n: 17,
            exponent: 2.0,
            focus: vec![0.0],
        });
        let c = generate_centers(&domain, &spec, 0).unwrap();
        let xs = c.points().as_flat();
        assert_eq!(xs.len(), 17);
        let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.windows(2).all(|g| g[1] > g[0]), "{gaps:?}");
    }

    #[test]
    fn clustered_separation_varies() {
        let domain = Domain::unit_box(2, 0.1).unwrap();
        let spec = CenterGenerator::new(GeneratorKind::Clustered {
            n: 60,
            clusters: 3,
            radius: 0.01,
        });
        let c = generate_centers(&domain, &spec, 3).unwrap();
        let q = separation(c.points()).unwrap();
        let (lo, hi) = q
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo >= 10.0, "ratio {}", hi / lo);
    }

    #[test]
    fn generator_errors() {
        let domain = Domain::unit_box(1, 0.1).unwrap();
        let bad = CenterGenerator::new(GeneratorKind::Graded {
            n: 10,
            exponent: 0.0,
            focus: vec![0.0],
        });
        assert!(matches!(
            generate_centers(&domain, &bad, 0),
            Err(Error::InvalidGenerator(_))
        ));
        let mut tiny = CenterGenerator::new(GeneratorKind::LowDiscrepancy { n: 2 });
        tiny.unisolvent_degree = 3;
        assert!(matches!(
            generate_centers(&domain, &tiny, 0),
            Err(Error::InvalidGenerator(_))
        ));
    }

    #[test]
    fn generators_are_reproducible() {
        let domain = Domain::unit_box(2, 0.1).unwrap();
        for kind in [
            GeneratorKind::LowDiscrepancy { n: 40 },
            GeneratorKind::Clustered {
                n: 40,
                clusters: 2,
                radius: 0.05,
            },
            GeneratorKind::Graded {
                n: 40,
                exponent: 1.5,
                focus: vec![0.3, 0.6],
            },
        ] {
            let spec = CenterGenerator::new(kind);
            let a = generate_centers(&domain, &spec, 11).unwrap();
            let b = generate_centers(&domain, &spec, 11).unwrap();
            assert_eq!(a.points().as_flat(), b.points().as_flat());
            assert!(a.points().iter().all(|p| domain.contains(p)));
        }
    }

    #[test]
    fn uniform_grid_ratio() {
        let domain = Domain::unit_box(1, 0.1).unwrap();
        let c = generate_centers(
            &domain,
            &CenterGenerator::new(GeneratorKind::UniformGrid { per_axis: 11 }),
            0,
        )
        .unwrap();
        let q = separation(c.points()).unwrap();
        let qmin = q.iter().cloned().fold(f64::INFINITY, f64::min);
        let h = fill_distance(&c, 201).unwrap();
        assert!((h / qmin - 0.5).abs() < 1e-9);
    }

    #[test]
    fn center_set_validation() {
        let domain = Domain::unit_box(1, 0.1).unwrap();
        assert!(matches!(
            CenterSet::new(domain.clone(), PointSet::line(&[0.2, 0.2])),
            Err(Error::DuplicateCenters { .. })
        ));
        assert!(matches!(
            CenterSet::new(domain.clone(), PointSet::line(&[0.2, 1.5])),
            Err(Error::OutsideDomain { index: 1 })
        ));
        assert!(matches!(
            CenterSet::new(domain, PointSet::line(&[0.0, 0.05])),
            Err(Error::EmptySupport)
        ));
        assert!(Domain::interval(0.0, 1.0, 0.6).is_err());
    }

    #[test]
    fn regions_validate() {
        assert!(Region::annulus(vec![0.0], 1.0, 1.5).is_err());
        assert!(Region::complement(vec![0.0], 1.0, 0.5).is_err());
        assert!(Region::ball(vec![0.0], 0.0).is_err());
        assert_eq!(
            Region::annulus(vec![0.0], 1.0, 0.25).unwrap().radial_extent(),
            (0.75, 1.0)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn separation_is_similarity_equivariant(
                raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..30),
                scale in 0.1f64..10.0,
                tx in -5.0f64..5.0,
                angle in 0.0f64..std::f64::consts::TAU,
            ) {
                let mut p = PointSet::new(2);
                for (x, y) in &raw { p.push(&[*x, *y]).unwrap(); }
                prop_assume!(find_duplicate(&p, 1e-6).is_none());
                let (s, c) = angle.sin_cos();
                let mut moved = PointSet::new(2);
                for q in p.iter() {
                    let x = scale * (c * q[0] - s * q[1]) + tx;
                    let y = scale * (s * q[0] + c * q[1]) - tx;
                    moved.push(&[x, y]).unwrap();
                }
                let a = separation(&p).unwrap();
                let b = separation(&moved).unwrap();
                for (u, v) in a.iter().zip(&b) {
                    prop_assert!((scale * u - v).abs() <= 1e-9 * (1.0 + v));
                }
            }
        }
    }
}
