//! Discrete proxies for the weighted analytic norms and empirical operator
//! constants.
//!
//! The x-analyticity radius is read off the exponential decay of Fourier
//! coefficients, the Y-weight off the decay of `sup_x |f|`. The sector angle
//! of the analytic spaces has no real-grid analogue and is not estimated.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::spectral::{amplitudes, ddx_values, dealias_cutoff, forward, wavenumber};
use crate::fields::{d2dy2_values, ddy_values, ddy_wide, Field2D, Grid, Trajectory, XSeries};
use crate::kernels::{apply_e1, apply_e2, apply_e3, apply_e3_dy, DyPath, KernelWorkspace, TimeQuadrature};

/// Fourier amplitudes below this fraction of the largest are noise.
pub const SPECTRAL_NOISE_FLOOR: f64 = 1e-13;
/// `sup_x |f|` below this is excluded from the Y-decay fit.
pub const DECAY_FLOOR: f64 = 1e-12;
const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormTerm {
    pub dy: u32,
    pub dx: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l: u32,
    pub mu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_hat: Option<f64>,
    pub weighted_sup: f64,
    pub per_term: Vec<NormTerm>,
}

/// Discrete `L²(0, 2π)` norm of each Y column.
fn x_l2(values: &ndarray::Array2<f64>) -> Vec<f64> {
    let nx = values.dim().0;
    let w = 2.0 * std::f64::consts::PI / nx as f64;
    values.columns().into_iter().map(|c| (c.iter().map(|v| v * v).sum::<f64>() * w).sqrt()).collect()
}

fn x_l2_row(row: &[f64]) -> f64 {
    let w = 2.0 * std::f64::consts::PI / row.len() as f64;
    (row.iter().map(|v| v * v).sum::<f64>() * w).sqrt()
}

/// `Σ_{α1 ≤ min(2,l), α1+α2 ≤ l} sup_Y e^{μY} ‖∂_Y^{α1} ∂_x^{α2} f(·, Y)‖_{L²_x}`, with
/// the decay estimates attached.
pub fn weighted_norm(f: &Field2D, l: u32, mu: f64) -> Result<NormReport> {
    let per_term = norm_terms(f, l, mu)?;
    Ok(NormReport {
        l,
        mu,
        rho_hat: analyticity_radius_x(f).ok(),
        mu_hat: decay_rate_y(f).ok(),
        weighted_sup: per_term.iter().map(|t| t.value).sum(),
        per_term,
    })
}

fn norm_terms(f: &Field2D, l: u32, mu: f64) -> Result<Vec<NormTerm>> {
    if l > 3 {
        return Err(Error::Domain(format!("norm order l = {l} exceeds 3")));
    }
    let g = f.grid();
    let ys = g.y_nodes();
    let mut out = Vec::new();
    for dy in 0..=l.min(2) {
        let base = match dy {
            0 => f.values().clone(),
            1 => ddy_values(g, f.values()),
            _ => d2dy2_values(g, f.values()),
        };
        for dx in 0..=(l - dy) {
            let d = ddx_values(&base, dx);
            let value = x_l2(&d).iter().zip(ys).map(|(n, y)| (mu * y).exp() * n).fold(0.0, f64::max);
            out.push(NormTerm { dy, dx, value });
        }
    }
    Ok(out)
}

/// Scalar `|f|_{l,μ}` without the decay estimates.
pub fn weighted_value(f: &Field2D, l: u32, mu: f64) -> Result<f64> {
    Ok(norm_terms(f, l, mu)?.iter().map(|t| t.value).sum())
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn mode_envelope(values: &ndarray::Array2<f64>) -> Vec<f64> {
    amplitudes(values).outer_iter().map(|row| row.iter().fold(0.0, |m: f64, v| m.max(*v))).collect()
}

/// x-analyticity radius from the decay of `max_Y |f̂(k, Y)|` over
/// `2 ≤ k ≤ Nx/3`.
pub fn analyticity_radius_x(f: &Field2D) -> Result<f64> {
    let nx = f.grid().nx();
    if nx < 16 {
        return Err(Error::Domain(format!("radius estimate needs Nx >= 16, got {nx}")));
    }
    let env = mode_envelope(f.values());
    let top = env.iter().fold(0.0, |m: f64, v| m.max(*v));
    let floor = SPECTRAL_NOISE_FLOOR * top;
    let (ks, logs): (Vec<f64>, Vec<f64>) =
        (2..=dealias_cutoff(nx)).filter(|&k| env[k] > floor && top > 0.0).map(|k| (k as f64, -env[k].ln())).unzip();
    if ks.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientDecay(format!("{} Fourier modes above the noise floor; need {MIN_FIT_POINTS}", ks.len())));
    }
    Ok(slope(&ks, &logs).max(0.0))
}

/// Y-decay rate from `sup_x |f(x, Y)|` over `[L/2, L]`; when fewer than four
/// values there clear [`DECAY_FLOOR`], the upper half of the resolved range
/// is used instead.
pub fn decay_rate_y(f: &Field2D) -> Result<f64> {
    let g = f.grid();
    let ys = g.y_nodes();
    let sup: Vec<f64> = f.values().columns().into_iter().map(|c| c.iter().fold(0.0, |m: f64, v| m.max(v.abs()))).collect();
    let resolved: Vec<usize> = (0..ys.len()).filter(|&j| sup[j] > DECAY_FLOOR).collect();
    let mut window: Vec<usize> = resolved.iter().copied().filter(|&j| ys[j] >= 0.5 * g.height()).collect();
    if window.len() < MIN_FIT_POINTS {
        if let Some(&last) = resolved.last() {
            let cut = 0.5 * ys[last];
            window = resolved.iter().copied().filter(|&j| ys[j] >= cut).collect();
        }
    }
    if window.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientDecay("too few resolved values for a Y-decay fit".into()));
    }
    let x: Vec<f64> = window.iter().map(|&j| ys[j]).collect();
    let y: Vec<f64> = window.iter().map(|&j| -sup[j].ln()).collect();
    let s = slope(&x, &y);
    if !(s > 1e-6) {
        return Err(Error::InsufficientDecay(format!("field does not decay in Y (fitted rate {s:e})")));
    }
    Ok(s)
}

/// `sup_Y (Σ_k e^{2ρ|k|} |f̂(k, Y)|²)^{1/2}`, the strip-norm proxy.
fn strip_norm(values: &ndarray::Array2<f64>, rho: f64) -> f64 {
    let (nx, ny) = values.dim();
    let c = forward(values);
    (0..ny)
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let k = wavenumber(i, nx).unsigned_abs() as f64;
                    (2.0 * rho * k).exp() * c[[i, j]].norm_sqr()
                })
                .sum::<f64>()
                .sqrt()
                / nx as f64
        })
        .fold(0.0, f64::max)
}

/// Cauchy-estimate ratio `‖∂_x f‖_{ρ'} (ρ - ρ') / ‖f‖_ρ`.
pub fn probe_cauchy_x(f: &Field2D, rho: f64, rho_prime: f64) -> Result<f64> {
    if !(0.0 <= rho_prime && rho_prime < rho) {
        return Err(Error::Domain(format!("need 0 <= rho' < rho, got ({rho}, {rho_prime})")));
    }
    match analyticity_radius_x(f) {
        Ok(r) if rho > r => {
            return Err(Error::Domain(format!("rho = {rho} exceeds the estimated radius {r:.4}")));
        }
        // band-limited data is entire
        Err(Error::InsufficientDecay(_)) | Ok(_) => {}
        Err(e) => return Err(e),
    }
    let denom = strip_norm(f.values(), rho);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(strip_norm(&ddx_values(f.values(), 1), rho_prime) * (rho - rho_prime) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeOp {
    E1,
    E2,
    E3,
    E3Dy,
}

/// Input of an operator probe: initial data for `E1`, a wall datum (and the
/// grid to evaluate on) for `E2`, a uniformly sampled history for `E3` and
/// `E3∂_Y`.
#[derive(Debug, Clone)]
pub enum ProbeInput {
    Initial(Field2D),
    Wall { grid: Arc<Grid>, phi: XSeries },
    History(Trajectory),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub op: ProbeOp,
    /// Per accepted sample: max over the probe times of output / bound functional.
    pub constants: Vec<f64>,
    pub constant: f64,
    pub rejected: Vec<Rejection>,
}

/// Sample hypotheses tolerance (Neumann trace, vanishing initial wall datum).
const HYPOTHESIS_TOL: f64 = 1e-6;

fn wall_norm(phi: &XSeries, l: u32) -> Vec<f64> {
    phi.values()
        .iter()
        .map(|row| {
            let col = ndarray::Array2::from_shape_fn((row.len(), 1), |(i, _)| row[i]);
            (0..=l).map(|d| x_l2_row(ddx_values(&col, d).column(0).as_slice().unwrap())).sum()
        })
        .collect()
}

fn probe_one(op: ProbeOp, input: &ProbeInput, times: &[f64], l: u32, mu: f64) -> Result<std::result::Result<f64, String>> {
    let mut worst: f64 = 0.0;
    match (op, input) {
        (ProbeOp::E1, ProbeInput::Initial(u)) => {
            let scale = u.max_abs().max(1e-300);
            let trace = ddy_wide(u).wall_row().iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            if trace > HYPOTHESIS_TOL * scale {
                return Ok(Err(format!("Neumann trace {trace:e} does not vanish")));
            }
            let base = weighted_value(u, l, mu)?;
            for &t in times {
                worst = worst.max(weighted_value(&apply_e1(u, t)?, l, mu)? / base);
            }
        }
        (ProbeOp::E2, ProbeInput::Wall { grid, phi }) => {
            let start = phi.values()[0].iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            if start > HYPOTHESIS_TOL {
                return Ok(Err(format!("wall datum {start:e} does not vanish at t = 0")));
            }
            let norms = wall_norm(phi, l);
            for &t in times {
                let bound = phi.times().iter().zip(&norms).filter(|(s, _)| **s <= t * (1.0 + 1e-12)).fold(0.0, |m: f64, (_, n)| m.max(*n));
                if bound > 0.0 {
                    worst = worst.max(weighted_value(&apply_e2(grid, phi, t)?, l, mu)? / bound);
                }
            }
        }
        (ProbeOp::E3, ProbeInput::History(src)) => {
            for &t in times {
                let n = src.index_of(t).ok_or_else(|| Error::Domain(format!("no snapshot at {t}")))?;
                let norms = history_norms(src, n, l, mu)?;
                let bound = trapezoid(&src.times()[..=n], &norms);
                if bound > 0.0 {
                    worst = worst.max(weighted_value(&apply_e3(src, t)?, l, mu)? / bound);
                }
            }
        }
        (ProbeOp::E3Dy, ProbeInput::History(u)) => {
            for &t in times {
                let n = u.index_of(t).ok_or_else(|| Error::Domain(format!("no snapshot at {t}")))?;
                let norms = history_norms(u, n, l, mu)?;
                let bound = singular_bound(u, n, &norms)?;
                if bound > 0.0 {
                    worst = worst.max(weighted_value(&apply_e3_dy(u, t, DyPath::ByParts)?, l, mu)? / bound);
                }
            }
        }
        _ => return Ok(Err(format!("input kind does not match operator {op:?}"))),
    }
    Ok(Ok(worst))
}

fn history_norms(h: &Trajectory, n: usize, l: u32, mu: f64) -> Result<Vec<f64>> {
    h.snapshots()[..=n].iter().map(|s| weighted_value(s, l, mu)).collect()
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1])).sum()
}

/// `∫_{t_0}^{t_n} (t_n - s)^{-1/2} g(s) ds` with `g` linear between nodes.
fn singular_bound(h: &Trajectory, n: usize, g: &[f64]) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let times = h.times();
    let dt = times[1] - times[0];
    let ws = KernelWorkspace::new(h.grid().clone(), dt, n, TimeQuadrature::default())?;
    Ok(ws
        .sing_quad(n)
        .iter()
        .map(|&(s, w)| {
            let p = (s / dt).clamp(0.0, n as f64);
            let k = (p.floor() as usize).min(n - 1);
            let a = p - k as f64;
            w * ((1.0 - a) * g[k] + a * g[k + 1])
        })
        .sum())
}

/// Empirical operator constants `max output-norm / bound-functional` over
/// samples and probe times. Bound functionals: `|u0|` for `E1`,
/// `sup_{s≤t} |φ(s)|_l` for `E2`, `∫_0^t |f(s)| ds` for `E3` and
/// `∫_0^t (t-s)^{-1/2} |u(s)| ds` for `E3∂_Y`.
pub fn probe_operator_bound(op: ProbeOp, samples: &[ProbeInput], times: &[f64], l: u32, mu: f64) -> Result<BoundReport> {
    let mut constants = Vec::new();
    let mut rejected = Vec::new();
    for (index, s) in samples.iter().enumerate() {
        match probe_one(op, s, times, l, mu)? {
            Ok(c) => constants.push(c),
            Err(reason) => rejected.push(Rejection { index, reason }),
        }
    }
    let constant = constants.iter().copied().fold(0.0, f64::max);
    Ok(BoundReport { op, constants, constant, rejected })
}
