//! Dense symmetric-indefinite factorization `P A P^T = L D L^T` with
//! Bunch-Kaufman pivoting, plus a Hager-Higham estimate of the 1-norm
//! condition number.

use crate::error::{Error, Result};

/// Row-major dense square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn swap_rows(&mut self, a: usize, b: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            self.data.swap(i * self.n + a, i * self.n + b);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Block {
    One(f64),
    /// Symmetric 2x2 block `[[a, b], [b, c]]`.
    Two {
        a: f64,
        b: f64,
        c: f64,
    },
    /// Second row of a 2x2 block; carries nothing.
    Tail,
}

/// Bunch-Kaufman factorization of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct LdlFactor {
    n: usize,
    /// Unit lower factor, row-major; entries inside 2x2 diagonal blocks are zero.
    lower: SquareMatrix,
    blocks: Vec<Block>,
    /// `perm[i]` is the original index placed at position `i`.
    perm: Vec<usize>,
    norm1: f64,
}

const BK_ALPHA: f64 = 0.640_388_203_202_208; // (1 + sqrt(17)) / 8

impl LdlFactor {
    /// Factors `a`, which must be symmetric. Only exact zero pivots fail.
    pub fn new(a: &SquareMatrix) -> Result<Self> {
        let n = a.n;
        let norm1 = a.norm1();
        let mut w = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut blocks = vec![Block::Tail; n];
        let mut k = 0;
        while k < n {
            let absakk = w.get(k, k).abs();
            let (imax, colmax) =
                (k + 1..n)
                    .map(|i| (i, w.get(i, k).abs()))
                    .fold((k, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if absakk.max(colmax) == 0.0 {
                return Err(Error::Factorization { column: k });
            }
            let (kp, kstep) = if absakk >= BK_ALPHA * colmax {
                (k, 1)
            } else {
                let rowmax = (k..n)
                    .filter(|&j| j != imax)
                    .map(|j| w.get(imax, j).abs())
                    .fold(0.0, f64::max);
                if absakk * rowmax >= BK_ALPHA * colmax * colmax {
                    (k, 1)
                } else if w.get(imax, imax).abs() >= BK_ALPHA * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };
            let kk = k + kstep - 1;
            if kp != kk {
                // symmetric interchange of kk and kp; rows of the finished
                // part of L move with them
                w.swap_rows(kk, kp, 0..n);
                w.swap_cols(kk, kp, k..n);
                perm.swap(kk, kp);
            }
            if kstep == 1 {
                let d = w.get(k, k);
                blocks[k] = Block::One(d);
                let col: Vec<f64> = (k + 1..n).map(|i| w.get(i, k)).collect();
                for (ii, i) in (k + 1..n).enumerate() {
                    let li = col[ii] / d;
                    for (jj, j) in (k + 1..n).enumerate() {
                        let v = w.get(i, j) - li * col[jj];
                        w.set(i, j, v);
                    }
                    w.set(i, k, li);
                }
            } else {
                let a11 = w.get(k, k);
                let a21 = w.get(k + 1, k);
                let a22 = w.get(k + 1, k + 1);
                let det = a11 * a22 - a21 * a21;
                if det == 0.0 {
                    return Err(Error::Factorization { column: k });
                }
                blocks[k] = Block::Two { a: a11, b: a21, c: a22 };
                blocks[k + 1] = Block::Tail;
                let c1: Vec<f64> = (k + 2..n).map(|i| w.get(i, k)).collect();
                let c2: Vec<f64> = (k + 2..n).map(|i| w.get(i, k + 1)).collect();
                for (ii, i) in (k + 2..n).enumerate() {
                    let l1 = (c1[ii] * a22 - c2[ii] * a21) / det;
                    let l2 = (c2[ii] * a11 - c1[ii] * a21) / det;
                    for (jj, j) in (k + 2..n).enumerate() {
                        let v = w.get(i, j) - l1 * c1[jj] - l2 * c2[jj];
                        w.set(i, j, v);
                    }
                    w.set(i, k, l1);
                    w.set(i, k + 1, l2);
                }
                w.set(k + 1, k, 0.0);
            }
            k += kstep;
        }
        // keep only the strict lower triangle as L
        let mut lower = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..i {
                lower.set(i, j, w.get(i, j));
            }
        }
        Ok(LdlFactor {
            n,
            lower,
            blocks,
            perm,
            norm1,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Number of negative eigenvalues of the factored matrix (Sylvester inertia).
    pub fn negative_eigenvalues(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match *b {
                Block::One(d) => usize::from(d < 0.0),
                Block::Two { a, b, c } => {
                    let det = a * c - b * b;
                    if det < 0.0 {
                        1
                    } else if a + c < 0.0 {
                        2
                    } else {
                        0
                    }
                }
                Block::Tail => 0,
            })
            .sum()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // L y = Pb
        for i in 0..n {
            let mut s = y[i];
            for (j, yj) in y.iter().enumerate().take(i) {
                s -= self.lower.get(i, j) * yj;
            }
            y[i] = s;
        }
        // D z = y
        let mut i = 0;
        while i < n {
            match self.blocks[i] {
                Block::One(d) => {
                    y[i] /= d;
                    i += 1;
                }
                Block::Two { a, b, c } => {
                    let det = a * c - b * b;
                    let (y1, y2) = (y[i], y[i + 1]);
                    y[i] = (c * y1 - b * y2) / det;
                    y[i + 1] = (a * y2 - b * y1) / det;
                    i += 2;
                }
                Block::Tail => unreachable!("2x2 tail visited out of order"),
            }
        }
        // L^T x = z
        for i in (0..n).rev() {
            let mut s = y[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                s -= self.lower.get(j, i) * yj;
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// Estimate of `||A^{-1}||_1` (Hager's method with Higham's refinements).
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let norm1 = |v: &[f64]| v.iter().map(|a| a.abs()).sum::<f64>();
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x);
            let e = norm1(&y);
            if iter > 0 && e <= est {
                break;
            }
            est = e;
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            // A is symmetric, so A^{-T} xi = A^{-1} xi
            let z = self.solve(&xi);
            let (j, zmax) =
                z.iter().enumerate().fold(
                    (0, f64::NEG_INFINITY),
                    |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b },
                );
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if iter > 0 && (zmax <= ztx || j == last_j) {
                break;
            }
            last_j = j;
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        // alternating test vector guards against unlucky cancellation
        let alt: Vec<f64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
            })
            .collect();
        let alt_est = 2.0 * norm1(&self.solve(&alt)) / (3.0 * n as f64);
        est.max(alt_est)
    }

    /// `||A||_1 * est(||A^{-1}||_1)`.
    pub fn condition_estimate(&self) -> f64 {
        self.norm1 * self.inverse_norm1_estimate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> SquareMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
        a
    }

    fn to_dense(a: &SquareMatrix) -> DMatrix<f64> {
        DMatrix::from_fn(a.size(), a.size(), |i, j| a.get(i, j))
    }

    #[test]
    fn solves_random_indefinite_systems() {
        for seed in 0..20 {
            let n = 3 + seed as usize;
            let a = random_symmetric(n, seed);
            let f = LdlFactor::new(&a).unwrap();
            let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
            let x = f.solve(&b);
            let r = a.mul_vec(&x);
            for (ri, bi) in r.iter().zip(&b) {
                assert!((ri - bi).abs() < 1e-9, "seed {seed}");
            }
        }
    }

    #[test]
    fn saddle_point_with_zero_block() {
        // [[2, 1, 1], [1, 2, 1], [1, 1, 0]]: forces a 2x2 pivot at some stage
        let mut a = SquareMatrix::zeros(3);
        let rows = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a.set(i, j, *v);
            }
        }
        let f = LdlFactor::new(&a).unwrap();
        let x = f.solve(&[1.0, 2.0, 3.0]);
        let r = a.mul_vec(&x);
        assert!(r.iter().zip([1.0, 2.0, 3.0]).all(|(u, v)| (u - v).abs() < 1e-14));
        assert_eq!(f.negative_eigenvalues(), 2);
    }

    #[test]
    fn inertia_matches_eigenvalues() {
        for seed in 0..10 {
            let a = random_symmetric(8, 100 + seed);
            let f = LdlFactor::new(&a).unwrap();
            let eig = to_dense(&a).symmetric_eigenvalues();
            let neg = eig.iter().filter(|v| **v < 0.0).count();
            assert_eq!(f.negative_eigenvalues(), neg);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = SquareMatrix::zeros(3);
        assert!(matches!(LdlFactor::new(&a), Err(Error::Factorization { column: 0 })));
    }

    #[test]
    fn condition_estimate_is_close_to_exact() {
        for seed in 0..10 {
            let a = random_symmetric(12, 200 + seed);
            let f = LdlFactor::new(&a).unwrap();
            let dense = to_dense(&a);
            let inv = dense.clone().try_inverse().unwrap();
            let col_norm = |m: &DMatrix<f64>| {
                (0..m.ncols())
                    .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
                    .fold(0.0, f64::max)
            };
            let kappa = col_norm(&dense) * col_norm(&inv);
            let est = f.condition_estimate();
            assert!(est <= kappa * (1.0 + 1e-10), "estimate {est} above exact {kappa}");
            assert!(est >= kappa / 10.0, "estimate {est} far below exact {kappa}");
        }
    }
}
