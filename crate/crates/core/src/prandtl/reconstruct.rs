use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::gauge::{from_tilde, from_u};
use super::EulerTrace;
use crate::error::{Error, Result};
use crate::fields::spectral::ddx_values;
use crate::fields::{cumint_values, d2dy2_values, ddy_values, ddy_wide, wall_slope, Field2D, Gauge, Trajectory, YWeight};
use crate::quadrature::fornberg_weights;

/// Physical velocities `(u^P, v^P)` from a gauged trajectory, with
/// `v^P = -∫_0^Y ∂_x ũ dY' - Y ∂_x U`.
pub fn reconstruct(traj: &Trajectory, trace: &EulerTrace) -> Result<(Trajectory, Trajectory)> {
    if traj.gauge() != Gauge::Gauged {
        return Err(Error::Domain("reconstruction needs a gauged trajectory".into()));
    }
    let mut ups = Vec::with_capacity(traj.len());
    let mut vps = Vec::with_capacity(traj.len());
    for u in traj.snapshots() {
        let tilde = from_u(u)?;
        let g = u.grid();
        let t = u.time();
        let mut v = cumint_values(g, &ddx_values(tilde.values(), 1), YWeight::One);
        let ys = g.y_nodes();
        for ((i, j), val) in v.indexed_iter_mut() {
            *val = -*val - ys[j] * trace.ux(g.x_nodes()[i], t);
        }
        vps.push(u.like(v).with_gauge(Gauge::Physical));
        ups.push(from_tilde(&tilde, trace)?);
    }
    Ok((Trajectory::new(ups)?, Trajectory::new(vps)?))
}

/// Max and L² norms of the Prandtl residuals over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResidualReport {
    pub momentum_max: f64,
    pub momentum_l2: f64,
    pub robin_max: f64,
    pub robin_l2: f64,
    pub far_field_max: f64,
    pub far_field_l2: f64,
    pub divergence_max: f64,
}

fn time_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|k| {
            let l = if k > 0 { times[k] - times[k - 1] } else { 0.0 };
            let r = if k + 1 < n { times[k + 1] - times[k] } else { 0.0 };
            0.5 * (l + r)
        })
        .collect()
}

/// `∂_t` at node `k`: centred three-point formula, one-sided at the ends.
fn time_derivative(traj: &Trajectory, k: usize) -> Array2<f64> {
    let n = traj.len();
    let idx: Vec<usize> = if n < 3 {
        (0..n).collect()
    } else if k == 0 {
        vec![0, 1, 2]
    } else if k + 1 == n {
        vec![n - 3, n - 2, n - 1]
    } else {
        vec![k - 1, k, k + 1]
    };
    let ts: Vec<f64> = idx.iter().map(|&i| traj.times()[i]).collect();
    let w = fornberg_weights(traj.times()[k], &ts, 1);
    let mut out = Array2::zeros(traj.snapshots()[k].values().dim());
    for (c, &i) in w[1].iter().zip(&idx) {
        out.scaled_add(*c, traj.snapshots()[i].values());
    }
    out
}

/// `∂_x u^P + ∂_Y v^P` at one instant (nine-point Y stencil).
pub fn divergence(up: &Field2D, vp: &Field2D) -> Field2D {
    up.like(ddx_values(up.values(), 1) + ddy_wide(vp).values())
}

/// Momentum residual `∂_t u + u ∂_x u + v ∂_Y u - ∂_YY u + ∂_x p`, Robin
/// residual `(u - ∂_Y u)|_{Y=0}` (three-point extrapolated slope) and
/// far-field mismatch `u(·, L) - U`.
pub fn residual_prandtl(up: &Trajectory, vp: &Trajectory, trace: &EulerTrace) -> Result<ResidualReport> {
    if up.len() != vp.len() || up.times() != vp.times() || !up.grid().same_layout(vp.grid()) {
        return Err(Error::Domain("u^P and v^P trajectories do not match".into()));
    }
    let g = up.grid();
    let tw = time_weights(up.times());
    let yw = g.y_weights();
    let dx = g.dx();
    let mut r = ResidualReport::default();
    let (mut m2, mut r2, mut f2) = (0.0, 0.0, 0.0);
    for (k, (u, v)) in up.snapshots().iter().zip(vp.snapshots()).enumerate() {
        let t = u.time();
        let uv = u.values();
        let mom = time_derivative(up, k) + uv * &ddx_values(uv, 1) + v.values() * &ddy_values(g, uv) - d2dy2_values(g, uv);
        for ((i, j), m) in mom.indexed_iter() {
            let m = m + trace.px(g.x_nodes()[i], t);
            r.momentum_max = r.momentum_max.max(m.abs());
            m2 += tw[k] * dx * yw[j] * m * m;
        }
        let slope = wall_slope(u, 3);
        for (i, &x) in g.x_nodes().iter().enumerate() {
            let rb = uv[[i, 0]] - slope[i];
            r.robin_max = r.robin_max.max(rb.abs());
            r2 += tw[k] * dx * rb * rb;
            let ff = uv[[i, g.ny() - 1]] - trace.u(x, t);
            r.far_field_max = r.far_field_max.max(ff.abs());
            f2 += tw[k] * dx * ff * ff;
        }
        r.divergence_max = r.divergence_max.max(divergence(u, v).max_abs());
    }
    r.momentum_l2 = m2.sqrt();
    r.robin_l2 = r2.sqrt();
    r.far_field_l2 = f2.sqrt();
    Ok(r)
}
