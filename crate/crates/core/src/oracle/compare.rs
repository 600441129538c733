use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::spectral::refine_x;
use crate::fields::{resample_y, Grid, Trajectory};

/// Cubic in Y.
const Y_WIDTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotError {
    pub time: f64,
    pub abs_linf: f64,
    pub rel_linf: f64,
    pub abs_l2: f64,
    pub rel_l2: f64,
}

/// Errors of `a` against the reference `b`. Global L∞ values are maxima over
/// snapshots, global L² values the root mean square of the snapshot values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub snapshots: Vec<SnapshotError>,
    pub abs_linf: f64,
    pub rel_linf: f64,
    pub abs_l2: f64,
    pub rel_l2: f64,
}

fn onto(values: &Array2<f64>, from: &Grid, to: &Grid) -> Array2<f64> {
    let v = if from.nx() == to.nx() { values.clone() } else { refine_x(values, to.nx()) };
    if from.same_layout(to) || (from.ny() == to.ny() && from.scheme() == to.scheme() && from.height() == to.height()) {
        v
    } else {
        resample_y(from, &v, to.y_nodes(), Y_WIDTH)
    }
}

/// Linear-in-time sample of `traj` at `t` (inside its span).
fn at_time(traj: &Trajectory, t: f64) -> Array2<f64> {
    let ts = traj.times();
    let snaps = traj.snapshots();
    let tol = 1e-12 * ts[ts.len() - 1].abs().max(1.0);
    if let Some(k) = ts.iter().position(|&s| (s - t).abs() <= tol) {
        return snaps[k].values().clone();
    }
    let k = ts.partition_point(|&s| s < t).clamp(1, ts.len() - 1);
    let th = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
    snaps[k - 1].values() * (1.0 - th) + snaps[k].values() * th
}

fn l2(grid: &Grid, v: &Array2<f64>) -> f64 {
    let w = grid.y_weights();
    let dx = grid.dx();
    let mut s = 0.0;
    for ((_, j), e) in v.indexed_iter() {
        s += dx * w[j] * e * e;
    }
    s.sqrt()
}

/// Compare two trajectories of the same gauge on the finer of the two grids,
/// at the snapshot times of the sparser one that fall in the common span.
pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<CompareReport> {
    if a.gauge() != b.gauge() {
        return Err(Error::Domain(format!("cannot compare {} with {}", a.gauge().name(), b.gauge().name())));
    }
    let (ga, gb) = (a.grid(), b.grid());
    let finer_x = ga.nx().max(gb.nx());
    let target = if gb.ny() > ga.ny() { gb.with_nx(finer_x)? } else { ga.with_nx(finer_x)? };

    let lo = a.times()[0].max(b.times()[0]);
    let hi = a.times()[a.len() - 1].min(b.times()[b.len() - 1]);
    let sparse = if a.len() <= b.len() { a } else { b };
    let eps = 1e-12 * hi.abs().max(1.0);
    let times: Vec<f64> = sparse.times().iter().copied().filter(|&t| t >= lo - eps && t <= hi + eps).collect();
    if times.is_empty() || lo > hi + eps {
        return Err(Error::Domain(format!("time spans do not overlap ({lo} > {hi})")));
    }

    let mut snapshots = Vec::with_capacity(times.len());
    for &t in &times {
        let va = onto(&at_time(a, t), ga, &target);
        let vb = onto(&at_time(b, t), gb, &target);
        let d = &va - &vb;
        let abs_linf = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ref_linf = vb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let abs_l2 = l2(&target, &d);
        let ref_l2 = l2(&target, &vb);
        let rel = |e: f64, r: f64| {
            if r > 0.0 {
                e / r
            } else if e == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        };
        snapshots.push(SnapshotError { time: t, abs_linf, rel_linf: rel(abs_linf, ref_linf), abs_l2, rel_l2: rel(abs_l2, ref_l2) });
    }
    let n = snapshots.len() as f64;
    let max = |f: fn(&SnapshotError) -> f64| snapshots.iter().map(f).fold(0.0f64, f64::max);
    let rms = |f: fn(&SnapshotError) -> f64| (snapshots.iter().map(|s| f(s).powi(2)).sum::<f64>() / n).sqrt();
    Ok(CompareReport {
        abs_linf: max(|s| s.abs_linf),
        rel_linf: max(|s| s.rel_linf),
        abs_l2: rms(|s| s.abs_l2),
        rel_l2: rms(|s| s.rel_l2),
        snapshots,
    })
}
