//! Browser demo: curves of Lagrange functions, Lebesgue functions and the
//! local density parameter for 1-D center sets on `[0, 1]`.

use splinestab::density::{DensityField, DensityParams};
use splinestab::geometry::{generate_centers, CenterGenerator, GeneratorKind};
use splinestab::interpolation::lagrange_basis;
use splinestab::stability::{lebesgue_function, penalized_function};
use splinestab::{CenterSet, Domain, PointSet, SplineOrder};
use wasm_bindgen::prelude::*;

const MARGIN: f64 = 0.02;

fn domain() -> Result<Domain, String> {
    Domain::interval(0.0, 1.0, MARGIN).map_err(|e| e.to_string())
}

fn centers_from(xs: &[f64]) -> Result<CenterSet, String> {
    if xs.len() < 2 {
        return Err("need at least two centers".into());
    }
    CenterSet::new(domain()?, PointSet::line(xs)).map_err(|e| e.to_string())
}

fn samples(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Graded centers pushed towards `focus`; `exponent = 1` gives a uniform grid.
pub fn graded(n: usize, exponent: f64, focus: f64) -> Result<Vec<f64>, String> {
    let gen = CenterGenerator::new(GeneratorKind::Graded {
        n,
        exponent,
        focus: vec![focus],
    });
    let set = generate_centers(&domain()?, &gen, 0).map_err(|e| e.to_string())?;
    let mut xs = set.points().as_flat().to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// `chi_index` at `count` equispaced points of `[0, 1]`.
pub fn lagrange(centers: &[f64], m: usize, index: usize, count: usize) -> Result<Vec<f64>, String> {
    let set = centers_from(centers)?;
    if index >= set.len() {
        return Err(format!("index {index} out of range for {} centers", set.len()));
    }
    let order = SplineOrder::new(m, 1).map_err(|e| e.to_string())?;
    let basis = lagrange_basis(&set, order).map_err(|e| e.to_string())?;
    Ok(samples(count).iter().map(|&t| basis.value(index, &[t])).collect())
}

/// Classical (`sigma = 0`) or penalized Lebesgue function at `count`
/// equispaced points, with `rho` of degree `m` computed on the same points.
pub fn lebesgue(centers: &[f64], m: usize, sigma: f64, count: usize) -> Result<Vec<f64>, String> {
    let set = centers_from(centers)?;
    let order = SplineOrder::new(m, 1).map_err(|e| e.to_string())?;
    let basis = lagrange_basis(&set, order).map_err(|e| e.to_string())?;
    let grid = PointSet::line(&samples(count));
    if sigma == 0.0 {
        return lebesgue_function(&basis, &grid, None).map_err(|e| e.to_string());
    }
    let field = DensityField::compute(&set, DensityParams::new(m, 1), &grid).map_err(|e| e.to_string())?;
    penalized_function(&basis, field.rho_at_probes(), sigma, &grid, None).map_err(|e| e.to_string())
}

/// Local density `rho` of precision `degree` at `count` equispaced points.
pub fn density(centers: &[f64], degree: usize, count: usize) -> Result<Vec<f64>, String> {
    let set = centers_from(centers)?;
    let grid = PointSet::line(&samples(count));
    let field = DensityField::compute(&set, DensityParams::new(degree, 1), &grid).map_err(|e| e.to_string())?;
    Ok(field.rho_at_probes().to_vec())
}

#[wasm_bindgen]
pub fn graded_centers(n: usize, exponent: f64, focus: f64) -> Result<Vec<f64>, JsValue> {
    graded(n, exponent, focus).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn lagrange_curve(centers: &[f64], m: usize, index: usize, count: usize) -> Result<Vec<f64>, JsValue> {
    lagrange(centers, m, index, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn lebesgue_curve(centers: &[f64], m: usize, sigma: f64, count: usize) -> Result<Vec<f64>, JsValue> {
    lebesgue(centers, m, sigma, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn density_curve(centers: &[f64], degree: usize, count: usize) -> Result<Vec<f64>, JsValue> {
    density(centers, degree, count).map_err(|e| JsValue::from_str(&e))
}
