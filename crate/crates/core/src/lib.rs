//! Surface spline (polyharmonic) interpolation on scattered centers, with
//! local density parameters, penalized Lebesgue constants and the numerical
//! machinery needed to check decay, stability and convergence behaviour on
//! desk-scale problems.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: domains, center sets, generators and spacing diagnostics.
//! * [`kernel`]: the surface spline kernel, its partial derivatives and
//!   normalized polynomial bases.
//! * [`linalg`]: dense symmetric-indefinite factorization with a 1-norm
//!   condition estimate.
//! * [`interpolation`]: the saddle-point system, interpolants and Lagrange bases.
//! * [`density`]: local polynomial reproductions and the local density field.
//! * [`seminorm`]: quadrature for Sobolev seminorms on balls, annuli and
//!   ball complements.
//! * [`stability`]: Lebesgue and penalized Lebesgue constants, decay fits and
//!   refinement sweeps.
//! * [`harness`]: test functions, convergence and near-best experiments,
//!   configuration, report writing and the command line front end.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod interpolation;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod par;
pub mod seminorm;
pub mod stability;

pub use error::{Error, Result};
pub use geometry::{CenterSet, Domain, PointSet};
pub use interpolation::{Interpolant, LagrangeBasis};
pub use kernel::{PolyBasis, SplineOrder};

/// Relative tolerance used for interpolation residuals, Kronecker checks and
/// side conditions throughout the library.
pub const INTERPOLATION_TOL: f64 = 1e-9;

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
