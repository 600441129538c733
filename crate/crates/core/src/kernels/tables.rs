//! Reflected-kernel quadrature tables.
//!
//! For a lag `τ` the even-reflected convolution
//! `∫_0^∞ [E(Y-Y',τ) + E(Y+Y',τ)] f(Y') dY'` is evaluated in the similarity
//! variable `η = (Y' - Y)/√(4τ)` (and `ζ = (Y' + Y)/√(4τ)` for the image),
//! with `f` represented by its local Lagrange interpolant on the grid. The
//! result is linear in the nodal data, so each lag becomes an `NY × NY`
//! matrix that is then applied to every x-row at once.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::fields::{Grid, INTERP_WIDTH};
use crate::quadrature::{lagrange_weights, locate, stencil_start, UnitRule};

/// Quadrature cut-off in the similarity variable; `e^{-49} ≈ 5e-22`.
pub const ETA_MAX: f64 = 7.0;
const PANEL_WIDTH: f64 = 0.5;
const PANEL_POINTS: usize = 16;

/// The smoothing matrix `G(τ)` (reflected kernel) and the matrix `B(τ)` with
/// `∫_0^∞ ∂_{Y'}[E(Y-Y',τ) + E(Y+Y',τ)] f(Y') dY' = τ^{-1/2} (B f)(Y)`.
#[derive(Debug, Clone)]
pub struct ReflectTables {
    pub smoothing: Array2<f64>,
    pub derivative: Array2<f64>,
}

fn scatter(grid: &Grid, y: f64, wg: f64, wb: f64, g: &mut [f64], b: &mut [f64]) {
    let nodes = grid.y_nodes();
    let n = nodes.len();
    if y >= grid.height() {
        g[n - 1] += wg;
        b[n - 1] += wb;
        return;
    }
    let cell = locate(nodes, y);
    let start = stencil_start(cell, INTERP_WIDTH, n);
    let mut w = [0.0; INTERP_WIDTH];
    lagrange_weights(&nodes[start..start + INTERP_WIDTH], y, &mut w);
    for (k, c) in w.iter().enumerate() {
        g[start + k] += wg * c;
        b[start + k] += wb * c;
    }
}

fn integrate_panels<F: FnMut(f64, f64)>(rule: &UnitRule, lo: f64, hi: f64, mut f: F) {
    if hi <= lo {
        return;
    }
    let panels = ((hi - lo) / PANEL_WIDTH).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for (eta, w) in rule.mapped(a, a + h) {
            f(eta, w);
        }
    }
}

/// Builds both tables for lag `tau > 0`.
pub fn reflect_tables(grid: &Grid, tau: f64) -> ReflectTables {
    debug_assert!(tau > 0.0);
    let ny = grid.ny();
    let rule = UnitRule::gauss_legendre(PANEL_POINTS);
    let h = (4.0 * tau).sqrt();
    let norm = 1.0 / PI.sqrt();
    let mut smoothing = Array2::zeros((ny, ny));
    let mut derivative = Array2::zeros((ny, ny));
    let mut grow = vec![0.0; ny];
    let mut brow = vec![0.0; ny];
    for (j, &y) in grid.y_nodes().iter().enumerate() {
        grow.iter_mut().for_each(|v| *v = 0.0);
        brow.iter_mut().for_each(|v| *v = 0.0);
        let a = (-y / h).max(-ETA_MAX);
        integrate_panels(&rule, a, ETA_MAX, |eta, w| {
            let k = norm * w * (-eta * eta).exp();
            scatter(grid, (y + h * eta).max(0.0), k, -eta * k, &mut grow, &mut brow);
        });
        let b = y / h;
        integrate_panels(&rule, b, ETA_MAX, |zeta, w| {
            let k = norm * w * (-zeta * zeta).exp();
            scatter(grid, (h * zeta - y).max(0.0), k, -zeta * k, &mut grow, &mut brow);
        });
        smoothing.row_mut(j).assign(&ndarray::ArrayView1::from(&grow));
        derivative.row_mut(j).assign(&ndarray::ArrayView1::from(&brow));
    }
    ReflectTables { smoothing, derivative }
}

/// Applies an `NY × NY` table to every x-row of `values`.
pub fn apply_table(table: &Array2<f64>, values: &Array2<f64>) -> Array2<f64> {
    values.dot(&table.t())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, YScheme};

    #[test]
    fn smoothing_rows_have_unit_mass() {
        let g = make_grid(8, 64, 15.0, YScheme::Stretched).unwrap();
        for &tau in &[1e-6, 1e-3, 0.05, 1.0] {
            let t = reflect_tables(&g, tau);
            for row in t.smoothing.outer_iter() {
                assert!((row.sum() - 1.0).abs() <= 1e-10, "tau {tau}: {}", row.sum());
            }
        }
    }

    #[test]
    fn derivative_table_on_constants_matches_wall_kernel() {
        // ∫ ∂_{Y'}K · 1 dY' = -2E(Y, τ)
        let g = make_grid(8, 64, 15.0, YScheme::Uniform).unwrap();
        let tau = 0.3;
        let t = reflect_tables(&g, tau);
        for (j, &y) in g.y_nodes().iter().enumerate() {
            let v = t.derivative.row(j).sum() / tau.sqrt();
            let e = -2.0 * crate::kernels::eval_e(y, tau).unwrap();
            assert!((v - e).abs() < 1e-12);
        }
    }
}
