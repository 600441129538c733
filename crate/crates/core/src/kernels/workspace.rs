//! Uniform-step Duhamel machinery.
//!
//! Every time integral `∫_0^{t_n} g(s) ds` is written with the lag
//! `τ = t_n - s = σ²`. The σ-interval `[√(m dt), √((m+1) dt)]` maps onto the
//! time step `[t_{n-m-1}, t_{n-m}]`, so the same σ-nodes (and hence the same
//! kernel tables) serve every output time. The first step, where the lag
//! vanishes, is further split into geometrically graded σ-panels to resolve
//! the wall layer `e^{-Y²/4σ²}`.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;

use super::pointwise::UNDERFLOW_EXPONENT;
use super::tables::{apply_table, reflect_tables, ReflectTables};
use crate::error::{Error, Result};
use crate::fields::Grid;
use crate::quadrature::{lagrange_weights, UnitRule};

/// Points of the Lagrange interpolant used between time nodes.
pub const TIME_INTERP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeQuadrature {
    /// Gauss points per time step.
    pub panel_points: usize,
    /// Geometric refinement levels inside the first step.
    pub wall_levels: usize,
}

impl Default for TimeQuadrature {
    fn default() -> Self {
        Self { panel_points: 6, wall_levels: 8 }
    }
}

#[derive(Debug, Clone)]
struct LagNode {
    sigma: f64,
    weight: f64,
    tables: ReflectTables,
}

#[derive(Debug, Clone)]
pub struct KernelWorkspace {
    grid: Arc<Grid>,
    dt: f64,
    time_nodes: Vec<f64>,
    /// `lags[m]`: σ-nodes covering step `m` back from the output time.
    lags: Vec<Vec<LagNode>>,
    /// `G(n dt)` for `n = 1..=steps`.
    propagators: Vec<Array2<f64>>,
}

fn sigma_panels(dt: f64, m: usize, q: &TimeQuadrature) -> Vec<(f64, f64)> {
    let rule = UnitRule::gauss_legendre(q.panel_points);
    let hi = ((m + 1) as f64 * dt).sqrt();
    if m > 0 {
        return rule.mapped((m as f64 * dt).sqrt(), hi).collect();
    }
    let mut out = Vec::new();
    let mut b = hi;
    for _ in 0..q.wall_levels {
        out.extend(rule.mapped(0.5 * b, b));
        b *= 0.5;
    }
    out.extend(rule.mapped(0.0, b));
    out
}

impl KernelWorkspace {
    pub fn new(grid: Arc<Grid>, dt: f64, steps: usize, quad: TimeQuadrature) -> Result<Self> {
        if !(dt > 0.0) || steps == 0 || quad.panel_points == 0 {
            return Err(Error::Config(format!("workspace needs dt > 0 and steps >= 1 (dt {dt}, steps {steps})")));
        }
        let time_nodes = (0..=steps).map(|n| n as f64 * dt).collect();
        let plan: Vec<(usize, f64, f64)> =
            (0..steps).flat_map(|m| sigma_panels(dt, m, &quad).into_iter().map(move |(s, w)| (m, s, w))).collect();
        let built: Vec<(usize, LagNode)> = plan
            .into_par_iter()
            .map(|(m, sigma, weight)| (m, LagNode { sigma, weight, tables: reflect_tables(&grid, sigma * sigma) }))
            .collect();
        let mut lags = vec![Vec::new(); steps];
        for (m, node) in built {
            lags[m].push(node);
        }
        let propagators = (1..=steps).into_par_iter().map(|n| reflect_tables(&grid, n as f64 * dt).smoothing).collect();
        Ok(Self { grid, dt, time_nodes, lags, propagators })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.time_nodes.len() - 1
    }

    pub fn time_nodes(&self) -> &[f64] {
        &self.time_nodes
    }

    /// Nodes `s` and weights `w` with `Σ w g(s) ≈ ∫_0^{t_n} g(s)(t_n - s)^{-1/2} ds`;
    /// exact for constant `g`.
    pub fn sing_quad(&self, n: usize) -> Vec<(f64, f64)> {
        let t = self.time_nodes[n];
        self.lags[..n].iter().flatten().map(|l| (t - l.sigma * l.sigma, 2.0 * l.weight)).collect()
    }

    /// `G(t_n)` applied to nodal data (the identity for `n = 0`).
    pub fn propagate(&self, values: &Array2<f64>, n: usize) -> Array2<f64> {
        if n == 0 {
            values.clone()
        } else {
            apply_table(&self.propagators[n - 1], values)
        }
    }

    /// Interpolation stencil in time for `s = t_n - σ²` using nodes `0..=n`.
    fn time_stencil(&self, n: usize, sigma: f64) -> (usize, [f64; TIME_INTERP], usize) {
        let p = n as f64 - sigma * sigma / self.dt;
        let width = TIME_INTERP.min(n + 1);
        let centre = (p.floor() as isize - 1).max(0) as usize;
        let start = centre.min(n + 1 - width);
        let nodes: Vec<f64> = (start..start + width).map(|k| k as f64).collect();
        let mut w = [0.0; TIME_INTERP];
        lagrange_weights(&nodes, p, &mut w[..width]);
        (start, w, width)
    }

    fn interp_hist(&self, hist: &[Array2<f64>], n: usize, sigma: f64) -> Array2<f64> {
        let (start, w, width) = self.time_stencil(n, sigma);
        let mut acc = &hist[start] * w[0];
        for k in 1..width {
            acc.scaled_add(w[k], &hist[start + k]);
        }
        acc
    }

    fn check_history(&self, len: usize, n: usize) -> Result<()> {
        if n > self.steps() || len < n + 1 {
            return Err(Error::Domain(format!(
                "history has {len} snapshots, output step {n} needs {} (workspace steps {})",
                n + 1,
                self.steps()
            )));
        }
        Ok(())
    }

    /// `∫_0^{t_n} G(t_n - s) f(s) ds` from nodal history `hist[k] = f(t_k)`.
    pub fn duhamel(&self, hist: &[Array2<f64>], n: usize) -> Result<Array2<f64>> {
        self.check_history(hist.len(), n)?;
        let mut out = Array2::zeros(hist[0].dim());
        for lag in self.lags[..n].iter().flatten() {
            let f = self.interp_hist(hist, n, lag.sigma);
            out.scaled_add(2.0 * lag.sigma * lag.weight, &apply_table(&lag.tables.smoothing, &f));
        }
        Ok(out)
    }

    /// `-2 ∫_0^{t_n} E(Y, t_n - s) φ(x, s) ds` from wall data `phi[k][i] = φ(x_i, t_k)`.
    pub fn wall_potential(&self, phi: &[Vec<f64>], n: usize) -> Result<Array2<f64>> {
        self.check_history(phi.len(), n)?;
        let nx = phi[0].len();
        let ys = self.grid.y_nodes();
        let mut out = Array2::zeros((nx, ys.len()));
        let c = -2.0 / PI.sqrt();
        for lag in self.lags[..n].iter().flatten() {
            let (start, w, width) = self.time_stencil(n, lag.sigma);
            let trace: Vec<f64> = (0..nx).map(|i| (0..width).map(|k| w[k] * phi[start + k][i]).sum()).collect();
            let s2 = 4.0 * lag.sigma * lag.sigma;
            for (j, &y) in ys.iter().enumerate() {
                let a = y * y / s2;
                if a > UNDERFLOW_EXPONENT {
                    break;
                }
                let k = c * lag.weight * (-a).exp();
                for i in 0..nx {
                    out[[i, j]] += k * trace[i];
                }
            }
        }
        Ok(out)
    }

    /// `∫_0^{t_n} G(t_n - s) ∂_Y u(s) ds` with the derivative moved onto the
    /// kernel; includes the wall term `-2∫ E(Y, t_n - s) u(x, 0, s) ds`.
    pub fn duhamel_dy(&self, hist: &[Array2<f64>], n: usize) -> Result<Array2<f64>> {
        self.check_history(hist.len(), n)?;
        let mut out = Array2::zeros(hist[0].dim());
        for lag in self.lags[..n].iter().flatten() {
            let f = self.interp_hist(hist, n, lag.sigma);
            out.scaled_add(-2.0 * lag.weight, &apply_table(&lag.tables.derivative, &f));
        }
        let wall: Vec<Vec<f64>> = hist[..=n].iter().map(|h| h.column(0).to_vec()).collect();
        out += &self.wall_potential(&wall, n)?;
        Ok(out)
    }

    /// [`Self::duhamel`] at every step `1..=steps` (index 0 is the zero field).
    pub fn duhamel_all(&self, hist: &[Array2<f64>]) -> Result<Vec<Array2<f64>>> {
        self.check_history(hist.len(), self.steps())?;
        let mut out: Vec<Array2<f64>> = (1..=self.steps()).into_par_iter().map(|n| self.duhamel(hist, n)).collect::<Result<_>>()?;
        out.insert(0, Array2::zeros(hist[0].dim()));
        Ok(out)
    }

    /// [`Self::duhamel_dy`] at every step.
    pub fn duhamel_dy_all(&self, hist: &[Array2<f64>]) -> Result<Vec<Array2<f64>>> {
        self.check_history(hist.len(), self.steps())?;
        let mut out: Vec<Array2<f64>> = (1..=self.steps()).into_par_iter().map(|n| self.duhamel_dy(hist, n)).collect::<Result<_>>()?;
        out.insert(0, Array2::zeros(hist[0].dim()));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, YScheme};

    fn ws(steps: usize) -> KernelWorkspace {
        let g = make_grid(8, 48, 15.0, YScheme::Stretched).unwrap();
        KernelWorkspace::new(g, 0.01, steps, TimeQuadrature::default()).unwrap()
    }

    #[test]
    fn singular_rule_exact_on_constants() {
        let w = ws(5);
        for n in 1..=5 {
            let t = w.time_nodes()[n];
            let s: f64 = w.sing_quad(n).iter().map(|(_, w)| w).sum();
            assert!((s - 2.0 * t.sqrt()).abs() <= 1e-12);
        }
    }

    #[test]
    fn singular_rule_integrates_smooth_weights() {
        // ∫_0^t s (t-s)^{-1/2} ds = (4/3) t^{3/2}
        let w = ws(4);
        let t = w.time_nodes()[4];
        let s: f64 = w.sing_quad(4).iter().map(|(s, w)| w * s).sum();
        assert!((s - 4.0 / 3.0 * t.powf(1.5)).abs() <= 1e-13);
    }

    #[test]
    fn short_history_is_rejected() {
        let w = ws(3);
        let h = vec![Array2::zeros((8, 48)); 2];
        assert!(matches!(w.duhamel(&h, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_history_cancels_in_by_parts_form() {
        let w = ws(4);
        let h = vec![Array2::from_elem((8, 48), 0.7); 5];
        let d = w.duhamel_dy(&h, 4).unwrap();
        assert!(d.iter().all(|v| v.abs() <= 1e-12), "{}", d.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
}
