//! Target functions for convergence experiments.

use crate::error::{Error, Result};
use crate::geometry::{dist, Bounds, Domain};
use crate::kernel::PolyBasis;

/// Smoothness class of a target function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Smoothness {
    Infinite,
    /// `C^k` but not `C^(k+1)`.
    Finite(u32),
    Polynomial(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `exp(1 - 1/(1 - t^2))` for `t = |x - c| / R < 1`.
    Bump,
    /// `(1 - t^2)_+^k`, which is `C^(k-1)`.
    TruncatedPower { k: u32 },
    /// Polynomial in `x - c` with coefficients in the monomial order of [`PolyBasis`].
    Polynomial { degree: usize, coefficients: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub name: String,
    pub center: Vec<f64>,
    /// Support radius (unused for polynomials).
    pub radius: f64,
    pub shape: Shape,
}

impl TestFunction {
    pub fn bump(center: Vec<f64>, radius: f64) -> Result<Self> {
        positive_radius(radius)?;
        Ok(TestFunction {
            name: "bump".into(),
            center,
            radius,
            shape: Shape::Bump,
        })
    }

    pub fn truncated_power(center: Vec<f64>, radius: f64, k: u32) -> Result<Self> {
        positive_radius(radius)?;
        if k == 0 {
            return Err(Error::InvalidArgument("truncated power needs k >= 1".into()));
        }
        Ok(TestFunction {
            name: format!("truncated_power_{k}"),
            center,
            radius,
            shape: Shape::TruncatedPower { k },
        })
    }

    pub fn polynomial(center: Vec<f64>, degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        let basis = PolyBasis::new(degree, center.clone(), 1.0)?;
        if coefficients.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: coefficients.len(),
            });
        }
        Ok(TestFunction {
            name: format!("polynomial_{degree}"),
            center,
            radius: f64::INFINITY,
            shape: Shape::Polynomial { degree, coefficients },
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn smoothness(&self) -> Smoothness {
        match &self.shape {
            Shape::Bump => Smoothness::Infinite,
            Shape::TruncatedPower { k } => Smoothness::Finite(k - 1),
            Shape::Polynomial { degree, .. } => Smoothness::Polynomial(*degree),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Bump => {
                let t2 = (dist(x, &self.center) / self.radius).powi(2);
                if t2 >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - t2)).exp()
                }
            }
            Shape::TruncatedPower { k } => {
                let t2 = (dist(x, &self.center) / self.radius).powi(2);
                if t2 >= 1.0 {
                    0.0
                } else {
                    (1.0 - t2).powi(*k as i32)
                }
            }
            Shape::Polynomial { degree, coefficients } => PolyBasis::new(*degree, self.center.clone(), 1.0)
                .and_then(|b| b.eval(coefficients, x))
                .unwrap_or(f64::NAN),
        }
    }

    /// Whether the support keeps distance `r0` from the boundary of `domain`.
    /// Polynomials are never compactly supported.
    pub fn support_fits(&self, domain: &Domain) -> bool {
        if matches!(self.shape, Shape::Polynomial { .. }) {
            return false;
        }
        let reach = self.radius + domain.r0();
        match domain.bounds() {
            Bounds::Box { lo, hi } => self
                .center
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(c, (a, b))| c - reach >= *a && c + reach <= *b),
            Bounds::Ball { center, radius } => dist(&self.center, center) + reach <= *radius,
        }
    }
}

fn positive_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "support radius must be positive, got {r}"
        )))
    }
}
