//! Half-line heat potentials with Neumann reflection.
//!
//! * `E1(t) u0` — reflected-kernel propagator (homogeneous Neumann data);
//! * `E2 φ` — single-layer potential with `∂_Y E2φ|_{Y=0} = φ`;
//! * `E3 f` — Duhamel integral of a source with homogeneous Neumann data.

mod pointwise;
mod tables;
mod verify;
mod workspace;

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use pointwise::{e1_of_linear, eval_e, eval_h, linear_defect, UNDERFLOW_EXPONENT};
pub use tables::{apply_table, reflect_tables, ReflectTables, ETA_MAX};
pub use verify::{
    e1_residual, e2_residual, e3_residual, kernel_identities, kernel_residuals, min_order, observed_orders, residuals, run_identities,
    Check, IdentityResult, KernelIdentity, ORDER_LEVELS,
};
pub use workspace::{KernelWorkspace, TimeQuadrature, TIME_INTERP};

use crate::error::{Error, Result};
use crate::fields::{ddy, Field2D, Grid, Trajectory, XSeries};
use crate::quadrature::{lagrange_weights, locate, stencil_start, UnitRule};

/// `|φ(0)|` above this violates the compatibility condition of `E2`.
pub const COMPAT_TOL: f64 = 1e-10;
/// Geometric σ-levels of the standalone single-layer quadrature.
const LAYER_LEVELS: usize = 24;
const LAYER_POINTS: usize = 8;

/// How `E3(∂_Y u)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DyPath {
    /// Differentiate the data, then apply `E3`.
    Direct,
    /// Move the derivative onto the kernel and add the wall term.
    ByParts,
}

pub fn apply_e1(u0: &Field2D, t: f64) -> Result<Field2D> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("E1 needs t > 0, got {t}")));
    }
    let g = reflect_tables(u0.grid(), t);
    Ok(u0.like(apply_table(&g.smoothing, u0.values())).with_time(u0.time() + t))
}

fn time_value(phi: &XSeries, s: f64) -> Vec<f64> {
    let times = phi.times();
    let n = times.len();
    let width = TIME_INTERP.min(n);
    let cell = locate(times, s).min(n.saturating_sub(2));
    let start = stencil_start(cell, width, n);
    let mut w = [0.0; TIME_INTERP];
    lagrange_weights(&times[start..start + width], s, &mut w[..width]);
    (0..phi.nx()).map(|i| (0..width).map(|k| w[k] * phi.values()[start + k][i]).sum()).collect()
}

/// `E2φ(t) = -2 ∫_0^t E(Y, t - s) φ(s) ds`, with `φ` interpolated between
/// its sample times (which must start at 0 and reach `t`).
pub fn apply_e2(grid: &Arc<Grid>, phi: &XSeries, t: f64) -> Result<Field2D> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("E2 needs t >= 0, got {t}")));
    }
    if phi.nx() != grid.nx() {
        return Err(Error::Domain("wall datum and grid disagree on Nx".into()));
    }
    let times = phi.times();
    if times[0].abs() > 1e-14 || *times.last().unwrap() < t * (1.0 - 1e-12) {
        return Err(Error::Domain(format!("wall datum sampled on [{}, {}], need [0, {t}]", times[0], times.last().unwrap())));
    }
    let start = phi.values()[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if start > COMPAT_TOL {
        return Err(Error::Compatibility(format!("wall datum does not vanish at t = 0: |φ(0)| = {start:e}")));
    }
    let mut out = Array2::zeros((grid.nx(), grid.ny()));
    if t == 0.0 {
        return Ok(Field2D::from_parts(grid.clone(), out, crate::fields::Gauge::Gauged, t));
    }
    let rule = UnitRule::gauss_legendre(LAYER_POINTS);
    let mut panels = Vec::with_capacity(LAYER_LEVELS + 1);
    let mut b = t.sqrt();
    for _ in 0..LAYER_LEVELS {
        panels.push((0.5 * b, b));
        b *= 0.5;
    }
    panels.push((0.0, b));
    let c = -2.0 / PI.sqrt();
    for (lo, hi) in panels {
        for (sigma, w) in rule.mapped(lo, hi) {
            let trace = time_value(phi, t - sigma * sigma);
            let s2 = 4.0 * sigma * sigma;
            for (j, &y) in grid.y_nodes().iter().enumerate() {
                let a = y * y / s2;
                if a > UNDERFLOW_EXPONENT {
                    break;
                }
                let k = c * w * (-a).exp();
                for (i, tr) in trace.iter().enumerate() {
                    out[[i, j]] += k * tr;
                }
            }
        }
    }
    Ok(Field2D::from_parts(grid.clone(), out, crate::fields::Gauge::Gauged, t))
}

/// Uniform step of a trajectory's time nodes.
fn uniform_step(traj: &Trajectory) -> Result<f64> {
    let times = traj.times();
    if times.len() < 2 {
        return Ok(0.0);
    }
    let dt = times[1] - times[0];
    for (k, s) in times.iter().enumerate() {
        if (s - times[0] - k as f64 * dt).abs() > 1e-9 * dt.max(1e-300) * (k.max(1) as f64) {
            return Err(Error::Domain("Duhamel history must be sampled on uniform time nodes".into()));
        }
    }
    Ok(dt)
}

fn history_until(traj: &Trajectory, t: f64) -> Result<(usize, f64)> {
    let n = traj.index_of(t).ok_or_else(|| Error::Domain(format!("no history snapshot at t = {t}")))?;
    Ok((n, uniform_step(traj)?))
}

/// `E3 f(t) = ∫_{t_0}^t G(t - s) f(s) ds`, where `t_0` is the first snapshot.
pub fn apply_e3(source: &Trajectory, t: f64) -> Result<Field2D> {
    let (n, dt) = history_until(source, t)?;
    let like = &source.snapshots()[n];
    if n == 0 {
        return Ok(like.like(Array2::zeros(like.values().dim())));
    }
    let ws = KernelWorkspace::new(source.grid().clone(), dt, n, TimeQuadrature::default())?;
    let hist: Vec<Array2<f64>> = source.snapshots()[..=n].iter().map(|s| s.values().clone()).collect();
    Ok(like.like(ws.duhamel(&hist, n)?))
}

/// `E3(∂_Y u)(t)` along either evaluation path.
pub fn apply_e3_dy(u_hist: &Trajectory, t: f64, path: DyPath) -> Result<Field2D> {
    match path {
        DyPath::Direct => apply_e3(&u_hist.map(|s| Ok(ddy(s)))?, t),
        DyPath::ByParts => {
            let (n, dt) = history_until(u_hist, t)?;
            let like = &u_hist.snapshots()[n];
            if n == 0 {
                return Ok(like.like(Array2::zeros(like.values().dim())));
            }
            let ws = KernelWorkspace::new(u_hist.grid().clone(), dt, n, TimeQuadrature::default())?;
            let hist: Vec<Array2<f64>> = u_hist.snapshots()[..=n].iter().map(|s| s.values().clone()).collect();
            Ok(like.like(ws.duhamel_dy(&hist, n)?))
        }
    }
}

#[cfg(test)]
mod tests;
