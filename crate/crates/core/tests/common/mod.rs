//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Natural cubic spline through `(x, y)` with sorted knots, extended linearly
/// outside the knot range.
pub struct NaturalCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl NaturalCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives
            let k = n - 2;
            let mut a = vec![0.0; k];
            let mut b = vec![0.0; k];
            let mut c = vec![0.0; k];
            let mut r = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                a[i - 1] = h0;
                b[i - 1] = 2.0 * (h0 + h1);
                c[i - 1] = h1;
                r[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let w = a[i] / b[i - 1];
                b[i] -= w * c[i - 1];
                r[i] -= w * r[i - 1];
            }
            let mut sol = vec![0.0; k];
            sol[k - 1] = r[k - 1] / b[k - 1];
            for i in (0..k - 1).rev() {
                sol[i] = (r[i] - c[i] * sol[i + 1]) / b[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        NaturalCubic {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    fn slope(&self, i: usize, at_left: bool) -> f64 {
        let (x, y, m) = (&self.x, &self.y, &self.m);
        let h = x[i + 1] - x[i];
        let base = (y[i + 1] - y[i]) / h;
        if at_left {
            base - h * (2.0 * m[i] + m[i + 1]) / 6.0
        } else {
            base + h * (m[i] + 2.0 * m[i + 1]) / 6.0
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (x, y, m) = (&self.x, &self.y, &self.m);
        let n = x.len();
        if t <= x[0] {
            return y[0] + self.slope(0, true) * (t - x[0]);
        }
        if t >= x[n - 1] {
            return y[n - 1] + self.slope(n - 2, false) * (t - x[n - 1]);
        }
        let i = match x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => return y[i],
            Err(i) => i - 1,
        };
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
    }

    /// Second derivative, piecewise linear between knots.
    pub fn second_derivative(&self, t: f64) -> f64 {
        let (x, m) = (&self.x, &self.m);
        let n = x.len();
        if t <= x[0] || t >= x[n - 1] {
            return 0.0;
        }
        let i = match x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => return m[i],
            Err(i) => i - 1,
        };
        let h = x[i + 1] - x[i];
        ((x[i + 1] - t) * m[i] + (t - x[i]) * m[i + 1]) / h
    }
}

/// Cardinal natural cubic spline for knot `j`.
pub fn cubic_cardinal(x: &[f64], j: usize) -> NaturalCubic {
    let mut y = vec![0.0; x.len()];
    y[j] = 1.0;
    NaturalCubic::new(x, &y)
}

/// Piecewise-linear hat for knot `j` of sorted knots `x`, constant outside
/// the hull.
pub fn hat(x: &[f64], j: usize, t: f64) -> f64 {
    let n = x.len();
    if t <= x[0] {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    if t >= x[n - 1] {
        return if j == n - 1 { 1.0 } else { 0.0 };
    }
    if j > 0 && t >= x[j - 1] && t <= x[j] {
        return (t - x[j - 1]) / (x[j] - x[j - 1]);
    }
    if j + 1 < n && t >= x[j] && t <= x[j + 1] {
        return (x[j + 1] - t) / (x[j + 1] - x[j]);
    }
    0.0
}

/// Thin-plate interpolant in raw coordinates by a dense LU solve of the
/// bordered system, evaluated at `probes`.
pub fn thin_plate_dense(centers: &[[f64; 2]], data: &[f64], probes: &[[f64; 2]]) -> Vec<f64> {
    let n = centers.len();
    let phi = |r: f64| if r == 0.0 { 0.0 } else { r * r * r.ln() };
    let dist = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let mut a = DMatrix::<f64>::zeros(n + 3, n + 3);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = phi(dist(&centers[i], &centers[j]));
        }
        let p = [1.0, centers[i][0], centers[i][1]];
        for k in 0..3 {
            a[(i, n + k)] = p[k];
            a[(n + k, i)] = p[k];
        }
    }
    let mut rhs = DVector::<f64>::zeros(n + 3);
    rhs.rows_mut(0, n).copy_from_slice(data);
    let sol = a.lu().solve(&rhs).expect("nonsingular");
    probes
        .iter()
        .map(|x| {
            let k: f64 = (0..n).map(|i| sol[i] * phi(dist(x, &centers[i]))).sum();
            k + sol[n] + sol[n + 1] * x[0] + sol[n + 2] * x[1]
        })
        .collect()
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn gauss_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let nrows = a.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = a[0].len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..nrows).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()));
        let Some(p) = pivot else { break };
        if a[p][col].abs() <= tol * scale {
            continue;
        }
        a.swap(rank, p);
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Deterministic pseudo-random stream for test inputs (splitmix64).
pub struct Stream(u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(seed)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
