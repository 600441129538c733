//! Self-check suite: every kernel identity as a named, measurable row.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    apply_e1, apply_e2, apply_e3, apply_e3_dy, e1_of_linear, eval_e, eval_h, reflect_tables, DyPath, KernelWorkspace, TimeQuadrature,
};
use crate::error::Result;
use crate::fields::{d2dy2, make_grid, wall_slope, Field2D, Gauge, Grid, Trajectory, XSeries, YScheme};
use crate::quadrature::UnitRule;

/// Whether the measured value must stay below or reach the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    AtMost,
    AtLeast,
}

pub struct KernelIdentity {
    pub name: &'static str,
    pub check: Check,
    pub tolerance: f64,
    pub measure: fn() -> Result<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub check: Check,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl KernelIdentity {
    pub fn run(&self, tolerance: Option<f64>) -> Result<IdentityResult> {
        let tol = tolerance.unwrap_or(self.tolerance);
        let value = (self.measure)()?;
        let passed = match self.check {
            Check::AtMost => value <= tol,
            Check::AtLeast => value >= tol,
        };
        Ok(IdentityResult { name: self.name.into(), check: self.check, value, tolerance: tol, passed })
    }
}

/// Refinement levels of the residual-order rows (uniform, ΔY halves).
pub const ORDER_LEVELS: [usize; 3] = [65, 129, 257];

pub fn kernel_identities() -> Vec<KernelIdentity> {
    use Check::*;
    let row = |name, check, tolerance, measure| KernelIdentity { name, check, tolerance, measure };
    vec![
        row("reflect_unit_mass", AtMost, 1e-10, unit_mass as fn() -> Result<f64>),
        row("flux_integral", AtMost, 1e-10, flux_integral),
        row("e1_linear_closed_form", AtMost, 1e-8, e1_linear),
        row("e1_gaussian", AtMost, 1e-7, e1_gaussian),
        row("e1_neumann_trace", AtMost, 1e-3, e1_trace),
        row("e1_residual_order", AtLeast, 2.0, || Ok(min_order(&residuals(e1_residual)?))),
        row("e2_wall_closed_form", AtMost, 1e-6, e2_wall),
        row("e2_neumann_jump", AtMost, 1e-3, e2_jump),
        row("e2_residual_order", AtLeast, 2.0, || Ok(min_order(&residuals(e2_residual)?))),
        row("e3_constant_source", AtMost, 1e-10, e3_constant),
        row("e3_gaussian_source", AtMost, 1e-6, e3_gaussian),
        row("e3_residual_order", AtLeast, 2.0, || Ok(min_order(&residuals(e3_residual)?))),
        row("e3_dy_paths_agree", AtMost, 1e-5, e3_dy_paths),
    ]
}

/// Run the suite, optionally restricted to one identity and with a common
/// tolerance override.
pub fn run_identities(filter: Option<&str>, tolerance: Option<f64>) -> Result<Vec<IdentityResult>> {
    let rows: Vec<_> = kernel_identities().into_iter().filter(|k| filter.is_none_or(|f| k.name == f)).collect();
    rows.par_iter().map(|k| k.run(tolerance)).collect()
}

fn stretched(ny: usize) -> Arc<Grid> {
    make_grid(8, ny, 15.0, YScheme::Stretched).expect("static grid")
}

fn rel_sup(a: &Field2D, exact: &Field2D) -> f64 {
    a.max_abs_diff(exact) / exact.max_abs()
}

fn history(g: &Arc<Grid>, dt: f64, steps: usize, f: impl Fn(f64, f64, f64) -> f64) -> Result<Trajectory> {
    let snaps = (0..=steps)
        .map(|k| {
            let t = k as f64 * dt;
            Field2D::from_fn(g.clone(), Gauge::Gauged, t, |x, y| f(x, y, t))
        })
        .collect::<Result<_>>()?;
    Trajectory::new(snaps)
}

fn unit_mass() -> Result<f64> {
    let g = stretched(64);
    let mut worst: f64 = 0.0;
    for &tau in &[1e-6, 1e-3, 0.05, 1.0] {
        for row in reflect_tables(&g, tau).smoothing.outer_iter() {
            worst = worst.max((row.sum() - 1.0).abs());
        }
    }
    Ok(worst)
}

fn flux_integral() -> Result<f64> {
    // ∫_Y^∞ H(Y', τ) dY' = 2E(Y, τ)
    let rule = UnitRule::gauss_legendre(20);
    let mut worst: f64 = 0.0;
    for &(y, tau) in &[(0.0f64, 0.1f64), (0.4, 0.01), (1.5, 1.0), (3.0, 0.7)] {
        let h = (4.0 * tau).sqrt();
        let mut q = 0.0;
        for p in 0..40 {
            let a = y + p as f64 * 0.25 * h;
            q += rule.integrate(a, a + 0.25 * h, |z| eval_h(z, tau).unwrap_or(f64::NAN));
        }
        worst = worst.max((q - 2.0 * eval_e(y, tau)?).abs());
    }
    Ok(worst)
}

fn e1_linear() -> Result<f64> {
    let g = stretched(128);
    let u0 = Field2D::from_fn(g.clone(), Gauge::Gauged, 0.0, |_, y| y)?;
    let mut worst: f64 = 0.0;
    for &t in &[1e-3, 0.05, 0.1] {
        let v = apply_e1(&u0, t)?;
        for (j, &y) in g.y_nodes().iter().enumerate().filter(|(_, y)| **y <= 7.5) {
            worst = worst.max((v.values()[[0, j]] - e1_of_linear(y, t)).abs());
        }
    }
    Ok(worst)
}

fn e1_gaussian() -> Result<f64> {
    let g = stretched(128);
    let u0 = Field2D::from_fn(g, Gauge::Gauged, 0.0, |_, y| (-y * y / 4.0).exp())?;
    let t: f64 = 0.1;
    let exact = u0.map_xy(|_, _, y| (1.0 + t).powf(-0.5) * (-y * y / (4.0 * (1.0 + t))).exp());
    Ok(rel_sup(&apply_e1(&u0, t)?.with_time(0.0), &exact))
}

fn e1_trace() -> Result<f64> {
    let g = stretched(128);
    let u0 = Field2D::from_fn(g, Gauge::Gauged, 0.0, |x, y| (1.0 + 0.5 * x.cos()) * (-y).exp())?;
    let v = apply_e1(&u0, 0.1)?;
    Ok(wall_slope(&v, 3).iter().fold(0.0f64, |m, s| m.max(s.abs())))
}

/// `-∫_Y^∞ ∫_0^t H(Y', t-τ) φ(τ) dτ dY'` by nested graded quadrature, with no
/// use of the single-integral reduction.
pub(crate) fn double_layer_oracle(y: f64, t: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let rule = UnitRule::gauss_legendre(12);
    let inner = |yp: f64| -> f64 {
        // lag τ graded towards 0, where H concentrates
        let mut acc = 0.0;
        let mut b = t;
        for _ in 0..60 {
            acc += rule.integrate(0.5 * b, b, |tau| eval_h(yp, tau).unwrap_or(0.0) * phi(t - tau));
            b *= 0.5;
        }
        acc
    };
    let top = y + 14.0 * t.sqrt();
    let mut acc = 0.0;
    // graded towards the lower limit, then uniform panels
    let mut lo = y;
    if y == 0.0 {
        let first = 0.05 * t.sqrt();
        let mut b = first;
        for _ in 0..40 {
            acc += rule.integrate(0.5 * b, b, inner);
            b *= 0.5;
        }
        lo = first;
    }
    let panels = 280;
    let h = (top - lo) / panels as f64;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        acc += rule.integrate(a, a + h, inner);
    }
    -acc
}

pub(crate) fn linear_datum(g: &Grid, t: f64, samples: usize) -> Result<XSeries> {
    let times = (0..=samples).map(|k| t * k as f64 / samples as f64).collect();
    XSeries::from_fn(times, g.x_nodes(), |_, s| s)
}

fn e2_wall() -> Result<f64> {
    // φ(t) = t: E2φ(0, t) = -(4 / 3√π) t^{3/2}, cross-checked by the double integral
    let g = stretched(128);
    let t: f64 = 0.1;
    let v = apply_e2(&g, &linear_datum(&g, t, 20)?, t)?.values()[[0, 0]];
    let exact = -4.0 / (3.0 * PI.sqrt()) * t.powf(1.5);
    let oracle = double_layer_oracle(0.0, t, |s| s);
    Ok(((v - exact) / exact).abs().max(((oracle - exact) / exact).abs()))
}

fn e2_jump() -> Result<f64> {
    let g = stretched(128);
    let t = 0.1;
    let v = apply_e2(&g, &linear_datum(&g, t, 20)?, t)?;
    Ok(wall_slope(&v, 3).iter().fold(0.0f64, |m, s| m.max((s - t).abs())))
}

fn e3_constant() -> Result<f64> {
    let g = stretched(64);
    let v = apply_e3(&history(&g, 0.01, 10, |_, _, _| 1.0)?, 0.1)?;
    Ok(v.values().iter().fold(0.0f64, |m, v| m.max((v - 0.1).abs())))
}

fn e3_gaussian() -> Result<f64> {
    let g = stretched(128);
    let t: f64 = 0.1;
    let v = apply_e3(&history(&g, 0.005, 20, |_, y, _| (-y * y / 4.0).exp())?, t)?;
    let rule = UnitRule::gauss_legendre(30);
    let exact = v.map_xy(|_, _, y| rule.integrate(0.0, t, |tau| (1.0 + tau).powf(-0.5) * (-y * y / (4.0 * (1.0 + tau))).exp()));
    Ok(rel_sup(&v, &exact))
}

fn e3_dy_paths() -> Result<f64> {
    let g = stretched(128);
    let u = history(&g, 0.005, 20, |_, y, _| (-y).exp())?;
    Ok(apply_e3_dy(&u, 0.1, DyPath::Direct)?.max_abs_diff(&apply_e3_dy(&u, 0.1, DyPath::ByParts)?))
}

/// Residuals are sampled at `RESIDUAL_T`, with a fourth-order central time
/// difference of step `RESIDUAL_DT`, on `Y ≤ RESIDUAL_TOP`.
const RESIDUAL_T: f64 = 0.05;
const RESIDUAL_DT: f64 = 2.5e-3;
const RESIDUAL_TOP: f64 = 10.0;

/// `sup |(∂_t - ∂_YY) w|` from samples at `t - 2δ, t - δ, t + δ, t + 2δ` and `t`.
fn heat_residual(samples: &[Field2D; 5], source: impl Fn(usize, usize) -> f64) -> f64 {
    let [m2, m1, mid, p1, p2] = samples;
    let lap = d2dy2(mid);
    let g = mid.grid();
    let mut worst: f64 = 0.0;
    for ((i, j), l) in lap.values().indexed_iter() {
        let y = g.y_nodes()[j];
        if y > RESIDUAL_TOP {
            continue;
        }
        let dt =
            (-p2.values()[[i, j]] + 8.0 * p1.values()[[i, j]] - 8.0 * m1.values()[[i, j]] + m2.values()[[i, j]]) / (12.0 * RESIDUAL_DT);
        worst = worst.max((dt - l - source(i, j)).abs());
    }
    worst
}

fn offsets() -> [f64; 5] {
    let (t, d) = (RESIDUAL_T, RESIDUAL_DT);
    [t - 2.0 * d, t - d, t, t + d, t + 2.0 * d]
}

fn run_five(f: impl Fn(f64) -> Result<Field2D>) -> Result<[Field2D; 5]> {
    let o = offsets();
    Ok([f(o[0])?, f(o[1])?, f(o[2])?, f(o[3])?, f(o[4])?])
}

fn order_grid(ny: usize) -> Result<Arc<Grid>> {
    make_grid(8, ny, 15.0, YScheme::Uniform)
}

fn residual_e1(u0: &Field2D) -> Result<f64> {
    Ok(heat_residual(&run_five(|t| apply_e1(u0, t))?, |_, _| 0.0))
}

/// `φ(x, s) = s·wall(x)`.
fn residual_e2(g: &Arc<Grid>, wall: &[f64]) -> Result<f64> {
    let end = RESIDUAL_T + 2.0 * RESIDUAL_DT;
    let times: Vec<f64> = (0..=12).map(|k| end * k as f64 / 12.0).collect();
    let phi = XSeries::new(times.clone(), times.iter().map(|s| wall.iter().map(|w| s * w).collect()).collect())?;
    Ok(heat_residual(&run_five(|t| apply_e2(g, &phi, t))?, |_, _| 0.0))
}

/// `f(s) = (1 + s)·u0`.
fn residual_e3(u0: &Field2D) -> Result<f64> {
    let g = u0.grid();
    let steps = ((RESIDUAL_T + 2.0 * RESIDUAL_DT) / RESIDUAL_DT).round() as usize;
    let src = Trajectory::new(
        (0..=steps)
            .map(|k| {
                let s = k as f64 * RESIDUAL_DT;
                Field2D::new(g.clone(), u0.values() * (1.0 + s), Gauge::Gauged, s)
            })
            .collect::<Result<_>>()?,
    )?;
    // one workspace serves all five sample times
    let ws = KernelWorkspace::new(g.clone(), RESIDUAL_DT, steps, TimeQuadrature::default())?;
    let hist: Vec<_> = src.snapshots().iter().map(|s| s.values().clone()).collect();
    let mid = u0.values() * (1.0 + RESIDUAL_T);
    let samples = run_five(|t| {
        let n = (t / RESIDUAL_DT).round() as usize;
        Field2D::new(g.clone(), ws.duhamel(&hist[..=n], n)?, Gauge::Gauged, t)
    })?;
    Ok(heat_residual(&samples, |i, j| mid[[i, j]]))
}

/// Heat residuals of `E1 u0`, `E2 φ` with `φ(x, s) = s·wall(x)`, and `E3 f`
/// with `f(s) = (1 + s)·f0`; `u0` and `f0` share a grid.
pub fn kernel_residuals(u0: &Field2D, wall: &[f64], f0: &Field2D) -> Result<[f64; 3]> {
    Ok([residual_e1(u0)?, residual_e2(u0.grid(), wall)?, residual_e3(f0)?])
}

fn reference_datum(ny: usize) -> Result<Field2D> {
    Field2D::from_fn(order_grid(ny)?, Gauge::Gauged, 0.0, |x, y| (1.0 + 0.5 * x.cos()) * (-y * y / 4.0).exp())
}

pub fn e1_residual(ny: usize) -> Result<f64> {
    residual_e1(&reference_datum(ny)?)
}

pub fn e2_residual(ny: usize) -> Result<f64> {
    let g = order_grid(ny)?;
    let wall: Vec<f64> = g.x_nodes().iter().map(|x| 1.0 + 0.5 * x.cos()).collect();
    residual_e2(&g, &wall)
}

pub fn e3_residual(ny: usize) -> Result<f64> {
    residual_e3(&reference_datum(ny)?)
}

/// Residuals at every level of [`ORDER_LEVELS`].
pub fn residuals(f: fn(usize) -> Result<f64>) -> Result<Vec<f64>> {
    ORDER_LEVELS.iter().map(|&n| f(n)).collect()
}

/// Observed orders between successive levels (ΔY halves each time).
pub fn observed_orders(res: &[f64]) -> Vec<f64> {
    res.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Smallest observed order; residuals at round-off count as exact.
pub fn min_order(res: &[f64]) -> f64 {
    if res.iter().all(|r| *r <= 1e-13) {
        return f64::INFINITY;
    }
    observed_orders(res).into_iter().fold(f64::INFINITY, f64::min)
}
