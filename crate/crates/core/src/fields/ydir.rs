//! Y-direction finite differences, cumulative quadrature and interpolation.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::field::Field2D;
use super::grid::{Grid, RowStencil};
use crate::quadrature::{fornberg_weights, lagrange_weights, locate, stencil_start};

/// Width of the local Lagrange interpolant used to evaluate grid data off-node.
pub const INTERP_WIDTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YWeight {
    One,
    ExpY,
}

fn apply_rows(values: &Array2<f64>, rows: &[RowStencil]) -> Array2<f64> {
    let (nx, ny) = values.dim();
    let mut out = Array2::zeros((nx, ny));
    for i in 0..nx {
        let src = values.row(i);
        let mut dst = out.row_mut(i);
        for (j, r) in rows.iter().enumerate() {
            dst[j] = r.weights.iter().enumerate().map(|(k, w)| w * src[r.start + k]).sum();
        }
    }
    out
}

pub fn ddy_values(grid: &Grid, values: &Array2<f64>) -> Array2<f64> {
    apply_rows(values, grid.d1())
}

pub fn d2dy2_values(grid: &Grid, values: &Array2<f64>) -> Array2<f64> {
    apply_rows(values, grid.d2())
}

/// Five-point finite-difference `∂_Y` (one-sided at both ends).
pub fn ddy(f: &Field2D) -> Field2D {
    f.like(ddy_values(f.grid(), f.values()))
}

/// Five-point finite-difference `∂_YY`.
pub fn d2dy2(f: &Field2D) -> Field2D {
    f.like(d2dy2_values(f.grid(), f.values()))
}

/// Nine-point `∂_Y`, for consistency checks that need near-spectral accuracy.
pub fn ddy_wide(f: &Field2D) -> Field2D {
    f.like(ddy_wide_values(f.grid(), f.values()))
}

pub fn ddy_wide_values(grid: &Grid, values: &Array2<f64>) -> Array2<f64> {
    apply_rows(values, grid.d1_wide())
}

/// `g(x, Y) = ∫_0^Y w(Y') f(x, Y') dY'` by cumulative quadrature.
pub fn cumint_y(f: &Field2D, weight: YWeight) -> Field2D {
    f.like(cumint_values(f.grid(), f.values(), weight))
}

pub fn cumint_values(grid: &Grid, values: &Array2<f64>, weight: YWeight) -> Array2<f64> {
    let (nx, ny) = values.dim();
    let w: Vec<f64> = match weight {
        YWeight::One => vec![1.0; ny],
        YWeight::ExpY => grid.y_nodes().iter().map(|y| y.exp()).collect(),
    };
    let mut out = Array2::zeros((nx, ny));
    for i in 0..nx {
        let src = values.row(i);
        let mut acc = 0.0;
        let mut dst = out.row_mut(i);
        dst[0] = 0.0;
        for (cell, r) in grid.cum_weights().iter().enumerate() {
            acc += r.weights.iter().enumerate().map(|(k, q)| q * w[r.start + k] * src[r.start + k]).sum::<f64>();
            dst[cell + 1] = acc;
        }
    }
    out
}

/// One-sided derivative at `Y = 0` from the polynomial through the first
/// `points` nodes; with three points this is Richardson extrapolation of
/// the forward difference.
pub fn wall_slope(f: &Field2D, points: usize) -> Vec<f64> {
    let y = &f.grid().y_nodes()[..points];
    let w = fornberg_weights(0.0, y, 1);
    f.values().outer_iter().map(|row| w[1].iter().zip(row.iter()).map(|(a, b)| a * b).sum()).collect()
}

/// Interpolation stencil at an arbitrary height. Heights beyond `L` take the
/// top value (decayed fields are flat there to within the far-field bound).
pub fn interp_stencil(grid: &Grid, y: f64, width: usize) -> (usize, Vec<f64>) {
    let nodes = grid.y_nodes();
    let n = nodes.len();
    if y >= grid.height() {
        let mut w = vec![0.0; width];
        w[width - 1] = 1.0;
        return (n - width, w);
    }
    let cell = locate(nodes, y);
    let start = stencil_start(cell, width, n);
    let mut w = vec![0.0; width];
    lagrange_weights(&nodes[start..start + width], y, &mut w);
    (start, w)
}

/// Resamples every x-row onto new heights with local Lagrange interpolation.
pub fn resample_y(grid: &Grid, values: &Array2<f64>, heights: &[f64], width: usize) -> Array2<f64> {
    let nx = values.dim().0;
    let stencils: Vec<_> = heights.iter().map(|&y| interp_stencil(grid, y, width)).collect();
    Array2::from_shape_fn((nx, heights.len()), |(i, j)| {
        let (s, w) = &stencils[j];
        w.iter().enumerate().map(|(k, c)| c * values[[i, s + k]]).sum()
    })
}
