//! Finite-difference time stepping on a uniform Y grid.
//!
//! Crank–Nicolson in `∂_YY` (one tridiagonal solve per x-column), second-order
//! Adams–Bashforth in everything else, sixth-order central differences in x.
//! Nothing here touches the spectral or kernel machinery.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{make_grid, Field2D, Gauge, Grid, Trajectory, YScheme};
use crate::prandtl::EulerTrace;

/// Sup bound beyond which a run is declared unstable.
pub const BLOWUP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhostOrder {
    /// One-sided wall difference.
    FirstOrder,
    /// Centred difference with a ghost node.
    SecondOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FDConfig {
    pub nx: usize,
    pub ny: usize,
    pub height: f64,
    pub dt: f64,
    /// Spacing of recorded snapshots; a whole number of steps.
    pub record_dt: f64,
    pub robin_ghost: GhostOrder,
}

impl Default for FDConfig {
    fn default() -> Self {
        Self { nx: 32, ny: 2049, height: 15.0, dt: 1e-4, record_dt: 0.005, robin_ghost: GhostOrder::SecondOrder }
    }
}

/// Diagnostics of an oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdStats {
    pub steps: usize,
    /// Largest advective Courant number `dt (|u|/Δx + |v|/ΔY)` met.
    pub cfl_max: f64,
}

fn whole_steps(span: f64, dt: f64, what: &str) -> Result<usize> {
    let r = span / dt;
    let n = r.round();
    if n < 1.0 || (r - n).abs() > 1e-8 * r.max(1.0) {
        return Err(Error::Config(format!("{what} = {span} is not a whole number of steps dt = {dt}")));
    }
    Ok(n as usize)
}

impl FDConfig {
    pub fn grid(&self) -> Result<Arc<Grid>> {
        make_grid(self.nx, self.ny, self.height, YScheme::Uniform)
    }

    fn validate(&self, t_final: f64) -> Result<(usize, usize)> {
        if !(self.dt > 0.0 && self.record_dt > 0.0 && t_final > 0.0) {
            return Err(Error::Config("oracle dt, record_dt and T must be positive".into()));
        }
        let every = whole_steps(self.record_dt, self.dt, "record_dt")?;
        let total = whole_steps(t_final, self.dt, "T")?;
        if total % every != 0 {
            return Err(Error::Config("T is not a whole number of record intervals".into()));
        }
        Ok((every, total))
    }
}

/// Sixth-order periodic first derivative in x, applied to every column.
fn ddx_fd(v: &Array2<f64>, dx: f64) -> Array2<f64> {
    const C: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    let (nx, ny) = v.dim();
    Array2::from_shape_fn((nx, ny), |(i, j)| {
        let mut s = 0.0;
        for (m, c) in C.iter().enumerate() {
            let p = (i + m + 1) % nx;
            let q = (i + nx - m - 1) % nx;
            s += c * (v[[p, j]] - v[[q, j]]);
        }
        s / dx
    })
}

/// Second-order `∂_Y` on the uniform grid; `wall` supplies the known wall slope.
fn ddy_fd(v: &Array2<f64>, h: f64, wall: impl Fn(usize) -> f64) -> Array2<f64> {
    let (nx, ny) = v.dim();
    Array2::from_shape_fn((nx, ny), |(i, j)| {
        if j == 0 {
            wall(i)
        } else if j + 1 == ny {
            (3.0 * v[[i, j]] - 4.0 * v[[i, j - 1]] + v[[i, j - 2]]) / (2.0 * h)
        } else {
            (v[[i, j + 1]] - v[[i, j - 1]]) / (2.0 * h)
        }
    })
}

/// Trapezoid `∫_0^Y w(Y') f dY'`.
fn cumtrapz(v: &Array2<f64>, h: f64, weight: impl Fn(usize) -> f64) -> Array2<f64> {
    let (nx, ny) = v.dim();
    let mut out = Array2::zeros((nx, ny));
    for i in 0..nx {
        for j in 1..ny {
            out[[i, j]] = out[[i, j - 1]] + 0.5 * h * (weight(j - 1) * v[[i, j - 1]] + weight(j) * v[[i, j]]);
        }
    }
    out
}

/// Thomas algorithm for a tridiagonal system; `a` sub-, `b` main, `c` super-diagonal.
fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) {
    let n = d.len();
    let mut cp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    d[0] /= b[0];
    for k in 1..n {
        let m = b[k] - a[k] * cp[k - 1];
        cp[k] = if k + 1 < n { c[k] / m } else { 0.0 };
        d[k] = (d[k] - a[k] * d[k - 1]) / m;
    }
    for k in (0..n - 1).rev() {
        d[k] -= cp[k] * d[k + 1];
    }
}

/// Wall closure `∂_Y u = α u + g` at `Y = 0`.
#[derive(Clone, Copy)]
struct Wall {
    alpha: f64,
}

/// Crank–Nicolson–AB2 stepper; `explicit` returns the non-diffusive right-hand
/// side, `wall_g` and `top` the boundary data at a given time.
struct Stepper<'a> {
    h: f64,
    dt: f64,
    wall: Wall,
    order: GhostOrder,
    wall_g: &'a dyn Fn(usize, f64) -> f64,
    top: &'a dyn Fn(usize, f64) -> f64,
}

impl Stepper<'_> {
    fn step(&self, u: &Array2<f64>, n_now: &Array2<f64>, n_prev: Option<&Array2<f64>>, t: f64) -> Array2<f64> {
        let (nx, ny) = u.dim();
        let (h, dt) = (self.h, self.dt);
        let r = dt / (h * h);
        let m = ny - 1; // unknowns 0..m-1, node m is Dirichlet
        let mut out = Array2::zeros((nx, ny));
        let mut a = vec![-0.5 * r; m];
        let mut b = vec![1.0 + r; m];
        let mut c = vec![-0.5 * r; m];
        let mut d = vec![0.0; m];
        for i in 0..nx {
            let g_old = (self.wall_g)(i, t);
            let g_new = (self.wall_g)(i, t + dt);
            let top_new = (self.top)(i, t + dt);
            for j in 0..m {
                let ex = match n_prev {
                    Some(p) => 1.5 * n_now[[i, j]] - 0.5 * p[[i, j]],
                    None => n_now[[i, j]],
                };
                let lap = if j == 0 {
                    // ghost u_{-1} = u_1 - 2h(α u_0 + g)
                    (2.0 * u[[i, 1]] - 2.0 * u[[i, 0]] - 2.0 * h * (self.wall.alpha * u[[i, 0]] + g_old)) / (h * h)
                } else {
                    (u[[i, j + 1]] - 2.0 * u[[i, j]] + u[[i, j - 1]]) / (h * h)
                };
                d[j] = u[[i, j]] + 0.5 * dt * lap + dt * ex;
            }
            d[m - 1] += 0.5 * r * top_new;
            match self.order {
                GhostOrder::SecondOrder => {
                    b[0] = 1.0 + r + r * h * self.wall.alpha;
                    c[0] = -r;
                    d[0] -= r * h * g_new;
                }
                GhostOrder::FirstOrder => {
                    // (u_1 - u_0)/h = α u_0 + g, imposed algebraically
                    b[0] = 1.0 + h * self.wall.alpha;
                    c[0] = -1.0;
                    d[0] = -h * g_new;
                }
            }
            a[0] = 0.0;
            thomas(&a, &b, &c, &mut d);
            for j in 0..m {
                out[[i, j]] = d[j];
            }
            out[[i, m]] = top_new;
        }
        out
    }
}

fn check_blowup(u: &Array2<f64>) -> Result<()> {
    let s = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(s <= BLOWUP) {
        return Err(Error::Instability(s));
    }
    Ok(())
}

fn run<F>(
    u0: &Array2<f64>,
    grid: &Arc<Grid>,
    gauge: Gauge,
    cfg: &FDConfig,
    t_final: f64,
    stepper: &Stepper,
    mut explicit: F,
) -> Result<(Trajectory, FdStats)>
where
    F: FnMut(&Array2<f64>, f64) -> Result<(Array2<f64>, f64)>,
{
    let (every, total) = cfg.validate(t_final)?;
    let mut u = u0.clone();
    let mut snaps = vec![Field2D::new(grid.clone(), u.clone(), gauge, 0.0)?];
    let mut prev: Option<Array2<f64>> = None;
    let mut cfl_max: f64 = 0.0;
    for n in 0..total {
        let t = n as f64 * cfg.dt;
        let (rhs, cfl) = explicit(&u, t)?;
        cfl_max = cfl_max.max(cfl);
        if cfl > 1.0 {
            return Err(Error::Config(format!("advective CFL {cfl:.3} > 1 at t = {t}; reduce dt")));
        }
        let next = stepper.step(&u, &rhs, prev.as_ref(), t);
        check_blowup(&next)?;
        prev = Some(rhs);
        u = next;
        if (n + 1) % every == 0 {
            snaps.push(Field2D::new(grid.clone(), u.clone(), gauge, (n + 1) as f64 * cfg.dt)?);
        }
    }
    Ok((Trajectory::new(snaps)?, FdStats { steps: total, cfl_max }))
}

fn resample_initial(u0: &Field2D, grid: &Arc<Grid>) -> Result<Array2<f64>> {
    if u0.grid().nx() != grid.nx() {
        return Err(Error::Domain("oracle Nx must match the initial datum".into()));
    }
    if u0.grid().same_layout(grid) {
        return Ok(u0.values().clone());
    }
    Err(Error::Domain("oracle initial datum must be given on the oracle grid".into()))
}

/// Robin-wall Prandtl system in physical variables: `u^P - ∂_Y u^P = 0` at
/// the wall, `u^P → U` at `Y = L`.
pub fn fd_solve_robin(u0p: &Field2D, trace: &EulerTrace, cfg: &FDConfig, t_final: f64) -> Result<(Trajectory, FdStats)> {
    if u0p.gauge() != Gauge::Physical {
        return Err(Error::Domain("Robin oracle needs physical initial data".into()));
    }
    let grid = cfg.grid()?;
    let u0 = resample_initial(u0p, &grid)?;
    let h = grid.y_nodes()[1];
    let dx = grid.dx();
    let xs = grid.x_nodes().to_vec();
    let zero = |_: usize, _: f64| 0.0;
    let top = |i: usize, t: f64| trace.u(xs[i], t);
    let stepper = Stepper { h, dt: cfg.dt, wall: Wall { alpha: 1.0 }, order: cfg.robin_ghost, wall_g: &zero, top: &top };
    run(&u0, &grid, Gauge::Physical, cfg, t_final, &stepper, |u, t| {
        let ux = ddx_fd(u, dx);
        let v = -cumtrapz(&ux, h, |_| 1.0);
        let uy = ddy_fd(u, h, |i| u[[i, 0]]);
        let mut cfl: f64 = 0.0;
        let rhs = Array2::from_shape_fn(u.dim(), |(i, j)| {
            cfl = cfl.max(cfg.dt * (u[[i, j]].abs() / dx + v[[i, j]].abs() / h));
            -(u[[i, j]] * ux[[i, j]] + v[[i, j]] * uy[[i, j]] + trace.px(xs[i], t))
        });
        Ok((rhs, cfl))
    })
}

/// Gauged Neumann system `(∂_t - ∂_YY) u = K(u) + 2∂_Y u`, `∂_Y u = U` at the
/// wall, `u = 0` at `Y = L`; `K` with finite-difference x-derivatives.
pub fn fd_solve_gauged(u0: &Field2D, trace: &EulerTrace, cfg: &FDConfig, t_final: f64) -> Result<(Trajectory, FdStats)> {
    if u0.gauge() != Gauge::Gauged {
        return Err(Error::Domain("gauged oracle needs gauged initial data".into()));
    }
    let grid = cfg.grid()?;
    let w0 = resample_initial(u0, &grid)?;
    let h = grid.y_nodes()[1];
    let dx = grid.dx();
    let xs = grid.x_nodes().to_vec();
    let ys = grid.y_nodes().to_vec();
    let ey: Vec<f64> = ys.iter().map(|y| y.exp()).collect();
    let wall_g = |i: usize, t: f64| trace.u(xs[i], t);
    let top = |_: usize, _: f64| 0.0;
    let stepper = Stepper { h, dt: cfg.dt, wall: Wall { alpha: 0.0 }, order: cfg.robin_ghost, wall_g: &wall_g, top: &top };
    run(&w0, &grid, Gauge::Gauged, cfg, t_final, &stepper, |u, t| {
        let ux = ddx_fd(u, dx);
        let uy = ddy_fd(u, h, |i| trace.u(xs[i], t));
        let lift = cumtrapz(&ux, h, |j| ey[j]);
        let mut cfl: f64 = 0.0;
        let rhs = Array2::from_shape_fn(u.dim(), |(i, j)| {
            let (x, y) = (xs[i], ys[j]);
            let (bu, bux) = (trace.u(x, t), trace.ux(x, t));
            let w = u[[i, j]];
            let up = ey[j] * w;
            let vp = -(lift[[i, j]] + y * bux);
            cfl = cfl.max(cfg.dt * ((up + bu).abs() / dx + vp.abs() / h));
            let k = -(up * ux[[i, j]] + w * bux + bu * ux[[i, j]]) + w + (lift[[i, j]] + y * bux) * (uy[[i, j]] + w);
            k + 2.0 * uy[[i, j]]
        });
        Ok((rhs, cfl))
    })
}
