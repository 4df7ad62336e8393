//! The surface spline kernel, its partial derivatives and normalized
//! monomial bases.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Order `m` and dimension `d` of a surface spline. Requires `2m > d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SplineOrder {
    m: usize,
    d: usize,
}

impl SplineOrder {
    pub fn new(m: usize, d: usize) -> Result<Self> {
        if d == 0 || m == 0 || 2 * m <= d {
            return Err(Error::InvalidArgument(format!(
                "surface spline order needs m > d/2 (m = {m}, d = {d})"
            )));
        }
        Ok(SplineOrder { m, d })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn even_dim(&self) -> bool {
        self.d.is_multiple_of(2)
    }

    /// Homogeneity degree `2m - d` of the kernel.
    pub fn power(&self) -> i32 {
        (2 * self.m - self.d) as i32
    }

    /// Sign making `sign * A^T Phi A` nonnegative on coefficient vectors
    /// annihilating `Pi_{m-1}`.
    pub fn energy_sign(&self) -> f64 {
        let e = self.m as i64 - self.d.div_ceil(2) as i64 + 1;
        if e.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Radial kernel `phi(r)`.
    pub fn phi(&self, r: f64) -> f64 {
        let k = self.power();
        if self.even_dim() {
            if r == 0.0 {
                0.0
            } else {
                r.powi(k) * r.ln()
            }
        } else {
            r.powi(k)
        }
    }

    /// Partial derivative `D^beta phi(|x|)`.
    pub fn phi_partial(&self, x: &[f64], beta: &[usize]) -> Result<f64> {
        KernelPartial::new(*self, beta)?.eval(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct TermKey {
    mono: Vec<u32>,
    rpow: i32,
    logpow: u32,
}

/// Closed form of `D^beta phi(|x|)` as a sum of terms
/// `c * x^gamma * r^p * (ln r)^j`, built by symbolic differentiation.
#[derive(Clone, Debug)]
pub struct KernelPartial {
    order: SplineOrder,
    beta: Vec<usize>,
    terms: Vec<(TermKey, f64)>,
}

impl KernelPartial {
    pub fn new(order: SplineOrder, beta: &[usize]) -> Result<Self> {
        let d = order.dim();
        if beta.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: beta.len(),
            });
        }
        let total: usize = beta.iter().sum();
        if total > order.m() {
            return Err(Error::InvalidArgument(format!(
                "derivative order {total} exceeds m = {}",
                order.m()
            )));
        }
        let mut terms: BTreeMap<TermKey, f64> = BTreeMap::new();
        terms.insert(
            TermKey {
                mono: vec![0; d],
                rpow: order.power(),
                logpow: u32::from(order.even_dim()),
            },
            1.0,
        );
        for (axis, &count) in beta.iter().enumerate() {
            for _ in 0..count {
                terms = differentiate(&terms, axis);
            }
        }
        Ok(KernelPartial {
            order,
            beta: beta.to_vec(),
            terms: terms.into_iter().collect(),
        })
    }

    pub fn beta(&self) -> &[usize] {
        &self.beta
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            let order: usize = self.beta.iter().sum();
            return if (order as i32) < self.order.power() {
                Ok(0.0)
            } else {
                Err(Error::SingularPoint { order })
            };
        }
        let r = r2.sqrt();
        let lr = r.ln();
        let mut acc = 0.0;
        for (key, c) in &self.terms {
            let mut v = *c;
            for (xi, &e) in x.iter().zip(&key.mono) {
                if e > 0 {
                    v *= xi.powi(e as i32);
                }
            }
            if key.rpow != 0 {
                v *= r.powi(key.rpow);
            }
            if key.logpow > 0 {
                v *= lr.powi(key.logpow as i32);
            }
            acc += v;
        }
        Ok(acc)
    }
}

fn differentiate(terms: &BTreeMap<TermKey, f64>, axis: usize) -> BTreeMap<TermKey, f64> {
    let mut out: BTreeMap<TermKey, f64> = BTreeMap::new();
    let mut add = |key: TermKey, c: f64| {
        *out.entry(key).or_insert(0.0) += c;
    };
    for (key, &c) in terms {
        // d/dx_i x^gamma
        let g = key.mono[axis];
        if g > 0 {
            let mut mono = key.mono.clone();
            mono[axis] -= 1;
            add(
                TermKey {
                    mono,
                    rpow: key.rpow,
                    logpow: key.logpow,
                },
                c * g as f64,
            );
        }
        let mut up = key.mono.clone();
        up[axis] += 1;
        // d/dx_i r^p = p x_i r^(p-2)
        if key.rpow != 0 {
            add(
                TermKey {
                    mono: up.clone(),
                    rpow: key.rpow - 2,
                    logpow: key.logpow,
                },
                c * key.rpow as f64,
            );
        }
        // d/dx_i (ln r)^j = j x_i r^(-2) (ln r)^(j-1)
        if key.logpow > 0 {
            add(
                TermKey {
                    mono: up,
                    rpow: key.rpow - 2,
                    logpow: key.logpow - 1,
                },
                c * key.logpow as f64,
            );
        }
    }
    out.retain(|_, c| *c != 0.0);
    out
}

/// All multi-indices in `d` variables with total degree exactly `k`, in
/// lexicographically descending order of the first exponent.
pub fn multi_indices_of_degree(d: usize, k: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in multi_indices_of_degree(d - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `dim Pi_degree = C(degree + d, d)`.
pub fn poly_dim(degree: usize, d: usize) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=d as u128 {
        num *= degree as u128 + i;
        den *= i;
    }
    (num / den) as usize
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Monomials of total degree at most `degree`, expressed in the normalized
/// variable `t = (x - center) / scale`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyBasis {
    degree: usize,
    dim: usize,
    center: Vec<f64>,
    scale: f64,
    exponents: Vec<Vec<usize>>,
}

impl PolyBasis {
    pub fn new(degree: usize, center: Vec<f64>, scale: f64) -> Result<Self> {
        let dim = center.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("polynomial basis needs d >= 1".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "basis scale must be positive, got {scale}"
            )));
        }
        let exponents = (0..=degree).flat_map(|k| multi_indices_of_degree(dim, k)).collect();
        Ok(PolyBasis {
            degree,
            dim,
            center,
            scale,
            exponents,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn exponents(&self) -> &[Vec<usize>] {
        &self.exponents
    }

    fn normalize(&self, x: &[f64], t: &mut [f64]) {
        for k in 0..self.dim {
            t[k] = (x[k] - self.center[k]) / self.scale;
        }
    }

    /// Values of every basis monomial at `x`.
    pub fn eval_all(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_all_into(x, &mut out);
        out
    }

    pub fn eval_all_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        let mut t = vec![0.0; self.dim];
        self.normalize(x, &mut t);
        for (o, e) in out.iter_mut().zip(&self.exponents) {
            *o = e.iter().zip(&t).map(|(&p, &v)| v.powi(p as i32)).product();
        }
    }

    pub fn eval(&self, coefficients: &[f64], x: &[f64]) -> Result<f64> {
        if coefficients.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: coefficients.len(),
            });
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.eval_all(x).iter().zip(coefficients).map(|(v, c)| v * c).sum())
    }

    /// `D^beta` (with respect to the original variable) of every basis monomial at `x`.
    pub fn partial_all(&self, x: &[f64], beta: &[usize]) -> Vec<f64> {
        let mut t = vec![0.0; self.dim];
        self.normalize(x, &mut t);
        let total: usize = beta.iter().sum();
        let chain = self.scale.powi(-(total as i32));
        self.exponents
            .iter()
            .map(|e| {
                let mut v = chain;
                for k in 0..self.dim {
                    if beta[k] > e[k] {
                        return 0.0;
                    }
                    let falling: f64 = (0..beta[k]).map(|j| (e[k] - j) as f64).product();
                    v *= falling * t[k].powi((e[k] - beta[k]) as i32);
                }
                v
            })
            .collect()
    }

    /// Vandermonde matrix: row `i`, column `j` is monomial `j` at point `i`.
    pub fn vandermonde(&self, points: &crate::geometry::PointSet) -> Result<DMatrix<f64>> {
        if points.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: points.dim(),
            });
        }
        let mut v = DMatrix::zeros(points.len(), self.len());
        let mut row = vec![0.0; self.len()];
        for (i, p) in points.iter().enumerate() {
            self.eval_all_into(p, &mut row);
            for (j, &val) in row.iter().enumerate() {
                v[(i, j)] = val;
            }
        }
        Ok(v)
    }
}
