//! Linear part `𝒰`, fixed-point map `F` and chunked Picard iteration.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::source::compute_k;
use super::EulerTrace;
use crate::error::{Error, Result};
use crate::fields::{ddy_wide, make_grid, Field2D, Gauge, Grid, Trajectory, XSeries, YScheme, FAR_FIELD_TOL};
use crate::kernels::{apply_e1, apply_e2, linear_defect, DyPath, KernelWorkspace, TimeQuadrature};

/// Sup-norm tolerance on `∂_Y u0|_{Y=0} - U(x, 0)`.
pub const COMPAT_TOL: f64 = 1e-6;
/// Time samples per unit interval used to tabulate the wall datum of `E2`
/// when `𝒰` is evaluated outside a solver workspace.
const DATUM_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub nx: usize,
    pub ny: usize,
    pub height: f64,
    pub scheme: YScheme,
    pub t_final: f64,
    pub steps: usize,
    pub chunk_t: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub far_field_tol: f64,
    pub panel_points: usize,
    pub wall_levels: usize,
    pub dy_path: DyPath,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let q = TimeQuadrature::default();
        Self {
            nx: 32,
            ny: 128,
            height: 15.0,
            scheme: YScheme::Stretched,
            t_final: 0.1,
            steps: 20,
            chunk_t: 0.05,
            picard_tol: 1e-9,
            picard_max_iters: 30,
            far_field_tol: FAR_FIELD_TOL,
            panel_points: q.panel_points,
            wall_levels: q.wall_levels,
            dy_path: DyPath::ByParts,
        }
    }
}

impl SolverConfig {
    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn quadrature(&self) -> TimeQuadrature {
        TimeQuadrature { panel_points: self.panel_points, wall_levels: self.wall_levels }
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        make_grid(self.nx, self.ny, self.height, self.scheme)
    }

    /// Time steps per Picard chunk.
    pub fn chunk_steps(&self) -> Result<usize> {
        let r = self.chunk_t / self.dt();
        let n = r.round();
        if n < 1.0 || (r - n).abs() > 1e-9 * r {
            return Err(Error::Config(format!("chunk_T = {} is not a whole number of steps dt = {}", self.chunk_t, self.dt())));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.height, self.t_final, self.chunk_t, self.picard_tol, self.far_field_tol];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || self.steps == 0 || self.picard_max_iters == 0 {
            return Err(Error::Config("solver parameters must be positive".into()));
        }
        if self.picard_tol >= 1.0 {
            return Err(Error::Config(format!("picard_tol must be < 1, got {}", self.picard_tol)));
        }
        if self.panel_points == 0 {
            return Err(Error::Config("panel_points must be positive".into()));
        }
        self.chunk_steps().map(|_| ())
    }
}

/// Iteration record of one Picard chunk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardState {
    pub chunk_start: f64,
    pub chunk_end: f64,
    pub iterate_index: usize,
    pub residual_history: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
}

impl PicardState {
    fn new(chunk_start: f64, chunk_end: f64) -> Self {
        Self { chunk_start, chunk_end, iterate_index: 0, residual_history: Vec::new(), contraction_ratios: Vec::new(), converged: false }
    }

    fn push(&mut self, residual: f64) {
        if let Some(&prev) = self.residual_history.last() {
            if prev > 0.0 {
                self.contraction_ratios.push(residual / prev);
            }
        }
        self.residual_history.push(residual);
        self.iterate_index += 1;
    }
}

/// `sup_x |∂_Y u0(x, 0) - U(x, t0)|`, by the wide one-sided stencil.
pub fn compatibility_mismatch(u0: &Field2D, trace: &EulerTrace) -> f64 {
    let d = ddy_wide(u0);
    let t = u0.time();
    u0.grid().x_nodes().iter().enumerate().map(|(i, &x)| (d.values()[[i, 0]] - trace.u(x, t)).abs()).fold(0.0, f64::max)
}

fn require_compatible(u0: &Field2D, trace: &EulerTrace) -> Result<()> {
    if u0.gauge() != Gauge::Gauged {
        return Err(Error::Domain(format!("initial datum must be gauged, got {}", u0.gauge())));
    }
    let m = compatibility_mismatch(u0, trace);
    if !(m <= COMPAT_TOL) {
        return Err(Error::Compatibility(format!("∂_Y u0 at the wall differs from U(x, 0) by {m:e} (tolerance {COMPAT_TOL:e})")));
    }
    Ok(())
}

/// `U(x, t0) (Y - E1(t)Y)` added to nodal values.
fn add_defect(values: &mut Array2<f64>, grid: &Grid, u_start: &[f64], t: f64) {
    let d: Vec<f64> = grid.y_nodes().iter().map(|&y| linear_defect(y, t)).collect();
    for ((i, j), v) in values.indexed_iter_mut() {
        *v += u_start[i] * d[j];
    }
}

/// Linear part of the fixed-point map after elapsed time `t` from `u0`:
/// `𝒰 = E1(t)(u0 - Y U0) + Y U0 + E2(U - U0)`, with `U0 = U(·, t0)`.
pub fn compute_cal_u(u0: &Field2D, trace: &EulerTrace, t: f64) -> Result<Field2D> {
    require_compatible(u0, trace)?;
    let grid = u0.grid();
    let t0 = u0.time();
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let mut out = apply_e1(u0, t)?;
    let u_start = trace.sample(grid.x_nodes(), t0);
    add_defect(out.values_mut(), grid, &u_start, t);
    if !trace_is_steady(trace) {
        let n = ((t * DATUM_SAMPLES as f64).ceil() as usize).max(8);
        let times: Vec<f64> = (0..=n).map(|k| t * k as f64 / n as f64).collect();
        let phi = XSeries::from_fn(times, grid.x_nodes(), |x, s| trace.u(x, t0 + s) - trace.u(x, t0))?;
        out = out.add(&apply_e2(grid, &phi, t)?);
    }
    Ok(out.with_time(t0 + t))
}

fn trace_is_steady(trace: &EulerTrace) -> bool {
    match trace {
        EulerTrace::Constant { .. } => true,
        EulerTrace::Fourier { modes } => modes.iter().all(|m| m.cos.len() <= 1 && m.sin.len() <= 1),
    }
}

/// Fixed-point machinery on one chunk of uniform steps.
struct Chunk<'a> {
    ws: &'a KernelWorkspace,
    trace: &'a EulerTrace,
    start: f64,
    path: DyPath,
}

impl Chunk<'_> {
    fn time(&self, n: usize) -> f64 {
        self.start + self.ws.time_nodes()[n]
    }

    /// `𝒰` at every node of the chunk.
    fn linear_part(&self, w0: &Array2<f64>) -> Result<Vec<Array2<f64>>> {
        let grid = self.ws.grid();
        let xs = grid.x_nodes();
        let u_start = self.trace.sample(xs, self.start);
        let phi: Vec<Vec<f64>> = (0..=self.ws.steps())
            .map(|n| {
                let t = self.time(n);
                xs.iter().zip(&u_start).map(|(&x, u0)| self.trace.u(x, t) - u0).collect()
            })
            .collect();
        let steady = phi.iter().flatten().all(|v| *v == 0.0);
        let mut out = Vec::with_capacity(self.ws.steps() + 1);
        out.push(w0.clone());
        for n in 1..=self.ws.steps() {
            let mut v = self.ws.propagate(w0, n);
            add_defect(&mut v, grid, &u_start, self.ws.time_nodes()[n]);
            if !steady {
                v += &self.ws.wall_potential(&phi, n)?;
            }
            out.push(v);
        }
        Ok(out)
    }

    /// `F(u)` at every node, given `𝒰` and the current iterate.
    fn map(&self, cal_u: &[Array2<f64>], hist: &[Array2<f64>]) -> Result<Vec<Array2<f64>>> {
        let grid = self.ws.grid();
        let k_hist = hist
            .iter()
            .enumerate()
            .map(|(n, h)| {
                let f = Field2D::from_parts(grid.clone(), h.clone(), Gauge::Gauged, self.time(n));
                compute_k(&f, self.trace, self.time(n)).map(Field2D::into_values)
            })
            .collect::<Result<Vec<_>>>()?;
        let src = self.ws.duhamel_all(&k_hist)?;
        let dy = match self.path {
            DyPath::ByParts => self.ws.duhamel_dy_all(hist)?,
            DyPath::Direct => {
                let d: Vec<Array2<f64>> = hist.iter().map(|h| crate::fields::ddy_values(grid, h)).collect();
                self.ws.duhamel_all(&d)?
            }
        };
        Ok(cal_u
            .iter()
            .zip(src)
            .zip(dy)
            .map(|((c, s), d)| {
                let mut f = c + &s;
                f.scaled_add(2.0, &d);
                f
            })
            .collect())
    }
}

fn sup_diff(a: &[Array2<f64>], b: &[Array2<f64>]) -> f64 {
    a.iter().zip(b).flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).abs())).fold(0.0, f64::max)
}

fn history_of(traj: &Trajectory) -> Vec<Array2<f64>> {
    traj.snapshots().iter().map(|s| s.values().clone()).collect()
}

/// `F(u, t)` for a gauged history starting at its first snapshot, which
/// doubles as the initial datum.
pub fn apply_f(u_hist: &Trajectory, trace: &EulerTrace, t: f64) -> Result<Field2D> {
    apply_f_with(u_hist, trace, t, DyPath::ByParts, TimeQuadrature::default())
}

pub fn apply_f_with(u_hist: &Trajectory, trace: &EulerTrace, t: f64, path: DyPath, quad: TimeQuadrature) -> Result<Field2D> {
    let n = u_hist.index_of(t).ok_or_else(|| Error::Domain(format!("no history snapshot at t = {t}")))?;
    let first = &u_hist.snapshots()[0];
    if first.gauge() != Gauge::Gauged {
        return Err(Error::Domain("F acts on gauged histories".into()));
    }
    require_compatible(first, trace)?;
    if n == 0 {
        return Ok(first.clone());
    }
    let times = u_hist.times();
    let dt = times[1] - times[0];
    if times[..=n].iter().enumerate().any(|(k, s)| (s - times[0] - k as f64 * dt).abs() > 1e-9 * dt * k.max(1) as f64) {
        return Err(Error::Domain("F needs a history on uniform time nodes".into()));
    }
    let ws = KernelWorkspace::new(u_hist.grid().clone(), dt, n, quad)?;
    let chunk = Chunk { ws: &ws, trace, start: times[0], path };
    let hist: Vec<Array2<f64>> = history_of(u_hist)[..=n].to_vec();
    let cal_u = chunk.linear_part(&hist[0])?;
    let f = chunk.map(&cal_u, &hist)?;
    Ok(first.like(f[n].clone()).with_time(times[n]))
}

/// Chunked Picard iteration `u^{(k+1)} = F(u^{(k)})` from `u^{(0)} = 𝒰`.
/// Returns the gauged trajectory on all time steps and one record per chunk.
pub fn picard_solve(u0: &Field2D, trace: &EulerTrace, cfg: &SolverConfig) -> Result<(Trajectory, Vec<PicardState>)> {
    cfg.validate()?;
    require_compatible(u0, trace)?;
    u0.check_far_field(cfg.far_field_tol)?;
    let grid = u0.grid().clone();
    let dt = cfg.dt();
    let per_chunk = cfg.chunk_steps()?;
    let quad = cfg.quadrature();
    let mut workspaces: Vec<(usize, KernelWorkspace)> = Vec::new();

    let mut snaps = vec![u0.clone()];
    let mut states = Vec::new();
    let mut done = 0;
    let t0 = u0.time();
    while done < cfg.steps {
        let steps = per_chunk.min(cfg.steps - done);
        if !workspaces.iter().any(|(s, _)| *s == steps) {
            workspaces.push((steps, KernelWorkspace::new(grid.clone(), dt, steps, quad)?));
        }
        let ws = &workspaces.iter().find(|(s, _)| *s == steps).unwrap().1;
        let start = t0 + done as f64 * dt;
        let chunk = Chunk { ws, trace, start, path: cfg.dy_path };
        let w0 = snaps.last().unwrap().values().clone();
        let cal_u = chunk.linear_part(&w0)?;
        let mut state = PicardState::new(start, start + steps as f64 * dt);
        let mut iterate = cal_u.clone();
        loop {
            let next = chunk.map(&cal_u, &iterate)?;
            let r = sup_diff(&next, &iterate);
            if !r.is_finite() {
                return Err(Error::NonConvergence {
                    iterations: state.iterate_index + 1,
                    last: r,
                    residual_history: state.residual_history,
                });
            }
            state.push(r);
            iterate = next;
            if r <= cfg.picard_tol {
                state.converged = true;
                break;
            }
            if state.iterate_index >= cfg.picard_max_iters {
                return Err(Error::NonConvergence { iterations: state.iterate_index, last: r, residual_history: state.residual_history });
            }
        }
        for (n, v) in iterate.into_iter().enumerate().skip(1) {
            snaps.push(Field2D::new(grid.clone(), v, Gauge::Gauged, chunk.time(n))?);
        }
        states.push(state);
        done += steps;
    }
    Ok((Trajectory::new(snaps)?, states))
}
