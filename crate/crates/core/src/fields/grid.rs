use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{fornberg_weights, stencil_start, UnitRule};

/// Node density ratio between the finest and coarsest Y cell of the
/// stretched scheme.
pub const STRETCH_RATIO: f64 = 16.0;

/// Width of the local interpolant behind the cumulative Y quadrature.
/// Integrates polynomials of degree `CUM_WIDTH - 1` exactly.
pub const CUM_WIDTH: usize = 6;

/// Default finite-difference stencil width in Y.
pub const FD_WIDTH: usize = 5;

/// Wide stencil used where near-spectral consistency is needed.
pub const FD_WIDE: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YScheme {
    Uniform,
    Stretched,
}

/// Precomputed one-row finite-difference weights, `start..start + w.len()`.
#[derive(Debug, Clone)]
pub struct RowStencil {
    pub start: usize,
    pub weights: Vec<f64>,
}

/// Periodic x-grid on `[0, 2π)` times a truncated Y-grid on `[0, L]`.
#[derive(Debug, Clone)]
pub struct Grid {
    nx: usize,
    ny: usize,
    height: f64,
    scheme: YScheme,
    x_nodes: Vec<f64>,
    y_nodes: Vec<f64>,
    y_weights: Vec<f64>,
    cum_weights: Vec<RowStencil>,
    d1: Vec<RowStencil>,
    d2: Vec<RowStencil>,
    d1_wide: Vec<RowStencil>,
}

/// Stretch map `Y(ξ) = L (e^{sξ} - 1)/(e^s - 1)` with `e^s = STRETCH_RATIO`.
pub fn stretched_node(xi: f64, height: f64) -> f64 {
    let s = STRETCH_RATIO.ln();
    height * (s * xi).exp_m1() / s.exp_m1()
}

pub fn make_grid(nx: usize, ny: usize, height: f64, scheme: YScheme) -> Result<Arc<Grid>> {
    if nx < 8 || !nx.is_power_of_two() {
        return Err(Error::Config(format!("Nx = {nx} must be a power of two >= 8")));
    }
    if ny < 16 {
        return Err(Error::Config(format!("NY = {ny} must be >= 16")));
    }
    if !(height > 0.0 && height.is_finite()) {
        return Err(Error::Config(format!("L = {height} must be positive")));
    }
    let x_nodes = (0..nx).map(|i| 2.0 * PI * i as f64 / nx as f64).collect();
    let last = (ny - 1) as f64;
    let mut y_nodes: Vec<f64> = (0..ny)
        .map(|j| match scheme {
            YScheme::Uniform => height * j as f64 / last,
            YScheme::Stretched => stretched_node(j as f64 / last, height),
        })
        .collect();
    y_nodes[0] = 0.0;
    y_nodes[ny - 1] = height;
    Ok(Arc::new(Grid::from_nodes(nx, height, scheme, x_nodes, y_nodes)))
}

fn derivative_rows(y: &[f64], width: usize, order: usize) -> Vec<RowStencil> {
    let n = y.len();
    (0..n)
        .map(|j| {
            let start = j.saturating_sub(width / 2).min(n - width);
            let w = fornberg_weights(y[j], &y[start..start + width], order);
            RowStencil { start, weights: w[order].clone() }
        })
        .collect()
}

impl Grid {
    fn from_nodes(nx: usize, height: f64, scheme: YScheme, x_nodes: Vec<f64>, y_nodes: Vec<f64>) -> Self {
        let ny = y_nodes.len();
        let gl = UnitRule::gauss_legendre(CUM_WIDTH / 2 + 1);
        let mut basis = [0.0; CUM_WIDTH];
        let cum_weights: Vec<RowStencil> = (0..ny - 1)
            .map(|i| {
                let start = stencil_start(i, CUM_WIDTH, ny);
                let nodes = &y_nodes[start..start + CUM_WIDTH];
                let mut w = vec![0.0; CUM_WIDTH];
                for (y, q) in gl.mapped(y_nodes[i], y_nodes[i + 1]) {
                    crate::quadrature::lagrange_weights(nodes, y, &mut basis);
                    for (wk, bk) in w.iter_mut().zip(&basis) {
                        *wk += q * bk;
                    }
                }
                RowStencil { start, weights: w }
            })
            .collect();
        let mut y_weights = vec![0.0; ny];
        for row in &cum_weights {
            for (k, w) in row.weights.iter().enumerate() {
                y_weights[row.start + k] += w;
            }
        }
        let d1 = derivative_rows(&y_nodes, FD_WIDTH, 1);
        let d2 = derivative_rows(&y_nodes, FD_WIDTH, 2);
        let d1_wide = derivative_rows(&y_nodes, FD_WIDE, 1);
        Self { nx, ny, height, scheme, x_nodes, y_nodes, y_weights, cum_weights, d1, d2, d1_wide }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn scheme(&self) -> YScheme {
        self.scheme
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }

    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }

    /// Weights of the full quadrature `∫_0^L`.
    pub fn y_weights(&self) -> &[f64] {
        &self.y_weights
    }

    /// Per-interval weights of the cumulative quadrature.
    pub fn cum_weights(&self) -> &[RowStencil] {
        &self.cum_weights
    }

    pub(crate) fn d1(&self) -> &[RowStencil] {
        &self.d1
    }

    pub(crate) fn d2(&self) -> &[RowStencil] {
        &self.d2
    }

    pub(crate) fn d1_wide(&self) -> &[RowStencil] {
        &self.d1_wide
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI / self.nx as f64
    }

    /// Same Y layout with a different x resolution.
    pub fn with_nx(&self, nx: usize) -> Result<Arc<Grid>> {
        if nx < 8 || !nx.is_power_of_two() {
            return Err(Error::Config(format!("Nx = {nx} must be a power of two >= 8")));
        }
        let x_nodes = (0..nx).map(|i| 2.0 * PI * i as f64 / nx as f64).collect();
        Ok(Arc::new(Grid::from_nodes(nx, self.height, self.scheme, x_nodes, self.y_nodes.clone())))
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self.nx == other.nx && self.y_nodes == other.y_nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_spacing_and_weights() {
        let g = make_grid(8, 16, 10.0, YScheme::Uniform).unwrap();
        let y = g.y_nodes();
        assert_eq!(y[0], 0.0);
        assert_eq!(y[15], 10.0);
        for (j, v) in y.iter().enumerate() {
            assert!((v - j as f64 * 10.0 / 15.0).abs() < 1e-14);
        }
        let total: f64 = g.y_weights().iter().sum();
        assert!((total - 10.0).abs() < 1e-12);
    }

    #[test]
    fn stretched_grid_clusters_near_wall() {
        let g = make_grid(32, 64, 15.0, YScheme::Stretched).unwrap();
        let y = g.y_nodes();
        let expected = 15.0 * (STRETCH_RATIO.ln() / 63.0).exp_m1() / (STRETCH_RATIO - 1.0);
        assert!((y[1] - expected).abs() < 1e-14);
        assert!(y[1] < 15.0 / 63.0);
        assert_eq!(y[63], 15.0);
        let h: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let ratio = h.iter().cloned().fold(0.0, f64::max) / h.iter().cloned().fold(f64::MAX, f64::min);
        assert!(ratio <= 20.0, "density ratio {ratio}");
        assert!(h.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn weights_exact_for_quintics() {
        for scheme in [YScheme::Uniform, YScheme::Stretched] {
            let g = make_grid(8, 40, 3.0, scheme).unwrap();
            for p in 0..CUM_WIDTH as i32 {
                let q: f64 = g.y_nodes().iter().zip(g.y_weights()).map(|(y, w)| w * y.powi(p)).sum();
                let exact = 3f64.powi(p + 1) / (p + 1) as f64;
                assert!((q - exact).abs() < 1e-11 * exact.max(1.0), "p={p}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(matches!(make_grid(12, 16, 1.0, YScheme::Uniform), Err(Error::Config(_))));
        assert!(matches!(make_grid(4, 16, 1.0, YScheme::Uniform), Err(Error::Config(_))));
        assert!(matches!(make_grid(8, 8, 1.0, YScheme::Uniform), Err(Error::Config(_))));
        assert!(matches!(make_grid(8, 16, 0.0, YScheme::Uniform), Err(Error::Config(_))));
    }
}
