use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};

/// Default bound on decayed fields at the truncation height.
pub const FAR_FIELD_TOL: f64 = 1e-8;

/// Which of the three unknowns a field represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// Physical tangential velocity `u^P`.
    Physical,
    /// Euler trace removed: `u^P - U`.
    Tilde,
    /// Decay gauge `e^{-Y}(u^P - U)`.
    Gauged,
}

impl Gauge {
    pub fn name(self) -> &'static str {
        match self {
            Gauge::Physical => "physical",
            Gauge::Tilde => "tilde",
            Gauge::Gauged => "gauged",
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scalar field on a [`Grid`] at one instant. `values[[i, j]]` is the
/// value at `(x_i, Y_j)`.
#[derive(Debug, Clone)]
pub struct Field2D {
    grid: Arc<Grid>,
    values: Array2<f64>,
    gauge: Gauge,
    time: f64,
}

impl PartialEq for Field2D {
    fn eq(&self, other: &Self) -> bool {
        self.gauge == other.gauge && self.time == other.time && self.grid.same_layout(&other.grid) && self.values == other.values
    }
}

impl Field2D {
    pub fn new(grid: Arc<Grid>, values: Array2<f64>, gauge: Gauge, time: f64) -> Result<Self> {
        if values.dim() != (grid.nx(), grid.ny()) {
            return Err(Error::Domain(format!("field shape {:?} does not match grid ({}, {})", values.dim(), grid.nx(), grid.ny())));
        }
        if !(time >= 0.0) {
            return Err(Error::Domain(format!("negative time {time}")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value {v}")));
        }
        Ok(Self { grid, values, gauge, time })
    }

    /// Trusted constructor for values produced by this crate's own operators.
    pub(crate) fn from_parts(grid: Arc<Grid>, values: Array2<f64>, gauge: Gauge, time: f64) -> Self {
        debug_assert_eq!(values.dim(), (grid.nx(), grid.ny()));
        Self { grid, values, gauge, time }
    }

    pub fn zeros(grid: Arc<Grid>, gauge: Gauge, time: f64) -> Self {
        let values = Array2::zeros((grid.nx(), grid.ny()));
        Self { grid, values, gauge, time }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Arc<Grid>, gauge: Gauge, time: f64, f: F) -> Result<Self> {
        let values = Array2::from_shape_fn((grid.nx(), grid.ny()), |(i, j)| f(grid.x_nodes()[i], grid.y_nodes()[j]));
        Self::new(grid, values, gauge, time)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn with_gauge(mut self, gauge: Gauge) -> Self {
        self.gauge = gauge;
        self
    }

    /// Same grid, gauge and time, new values.
    pub fn like(&self, values: Array2<f64>) -> Self {
        Self::from_parts(self.grid.clone(), values, self.gauge, self.time)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        self.like(self.values.mapv(f))
    }

    /// Pointwise `f(value, x, Y)`.
    pub fn map_xy<F: Fn(f64, f64, f64) -> f64>(&self, f: F) -> Self {
        let g = &self.grid;
        let mut out = self.values.clone();
        for ((i, j), v) in out.indexed_iter_mut() {
            *v = f(*v, g.x_nodes()[i], g.y_nodes()[j]);
        }
        self.like(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Values along `Y = L`.
    pub fn top_row(&self) -> Vec<f64> {
        self.values.column(self.grid.ny() - 1).to_vec()
    }

    /// Values at the wall `Y = 0`.
    pub fn wall_row(&self) -> Vec<f64> {
        self.values.column(0).to_vec()
    }

    /// Checks `|f(·, L)| <= tol`.
    pub fn check_far_field(&self, tol: f64) -> Result<()> {
        let top = self.top_row().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top > tol {
            return Err(Error::Domain(format!("{} field not decayed at Y = L: |f| = {top:e} > {tol:e}", self.gauge)));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Field2D) -> f64 {
        Zip::from(&self.values).and(&other.values).fold(0.0f64, |m, a, b| m.max((a - b).abs()))
    }

    pub fn add(&self, other: &Field2D) -> Field2D {
        self.like(&self.values + &other.values)
    }

    pub fn sub(&self, other: &Field2D) -> Field2D {
        self.like(&self.values - &other.values)
    }

    pub fn scale(&self, a: f64) -> Field2D {
        self.like(&self.values * a)
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Field2D) {
        self.values.scaled_add(a, &other.values);
    }
}

/// Time-indexed sequence of snapshots sharing grid and gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    snapshots: Vec<Field2D>,
}

impl Trajectory {
    pub fn new(snapshots: Vec<Field2D>) -> Result<Self> {
        let first = snapshots.first().ok_or_else(|| Error::Domain("empty trajectory".into()))?;
        for w in snapshots.windows(2) {
            if !(w[1].time > w[0].time) {
                return Err(Error::Domain(format!("times not strictly increasing: {} then {}", w[0].time, w[1].time)));
            }
        }
        for s in &snapshots {
            if s.gauge != first.gauge || !s.grid.same_layout(&first.grid) {
                return Err(Error::Domain("snapshots disagree on grid or gauge".into()));
            }
        }
        let times = snapshots.iter().map(|s| s.time).collect();
        Ok(Self { times, snapshots })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Field2D] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.snapshots[0].grid()
    }

    pub fn gauge(&self) -> Gauge {
        self.snapshots[0].gauge()
    }

    pub fn last(&self) -> &Field2D {
        self.snapshots.last().expect("non-empty")
    }

    /// Index of the snapshot at time `t`, if `t` is a node.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * t.abs().max(1.0);
        self.times.iter().position(|s| (s - t).abs() <= tol)
    }

    /// Applies `f` to every snapshot.
    pub fn map<F: Fn(&Field2D) -> Result<Field2D>>(&self, f: F) -> Result<Trajectory> {
        let snaps = self.snapshots.iter().map(f).collect::<Result<Vec<_>>>()?;
        Trajectory::new(snaps)
    }

    /// Concatenates `other` after `self`, dropping a duplicated junction node.
    pub fn extend(&mut self, other: Trajectory) -> Result<()> {
        let last = *self.times.last().expect("non-empty");
        for s in other.snapshots {
            if (s.time - last).abs() <= 1e-12 * last.max(1.0) {
                continue;
            }
            if s.time < last {
                return Err(Error::Domain("trajectory extension goes back in time".into()));
            }
            self.times.push(s.time);
            self.snapshots.push(s);
        }
        Ok(())
    }
}

/// Time series of x-profiles, e.g. a wall datum `φ(x, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct XSeries {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl XSeries {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Domain("series times and values differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("series times not strictly increasing".into()));
        }
        let nx = values[0].len();
        if values.iter().any(|v| v.len() != nx || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::Domain("series profiles ragged or non-finite".into()));
        }
        Ok(Self { times, values })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(times: Vec<f64>, x_nodes: &[f64], f: F) -> Result<Self> {
        let values = times.iter().map(|&t| x_nodes.iter().map(|&x| f(x, t)).collect()).collect();
        Self::new(times, values)
    }

    /// Wall trace `u(x, 0, t)` of a trajectory.
    pub fn wall_trace(traj: &Trajectory) -> Self {
        Self { times: traj.times().to_vec(), values: traj.snapshots().iter().map(|s| s.wall_row()).collect() }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn nx(&self) -> usize {
        self.values[0].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, YScheme};

    #[test]
    fn rejects_non_finite_values() {
        let g = make_grid(8, 16, 1.0, YScheme::Uniform).unwrap();
        let bad = Field2D::from_fn(g, Gauge::Gauged, 0.0, |_, y| if y > 0.5 { f64::NAN } else { 0.0 });
        assert!(matches!(bad, Err(Error::Domain(_))));
    }

    #[test]
    fn far_field_check() {
        let g = make_grid(8, 16, 30.0, YScheme::Uniform).unwrap();
        let f = Field2D::from_fn(g.clone(), Gauge::Gauged, 0.0, |_, y| (-y).exp()).unwrap();
        assert!(f.check_far_field(FAR_FIELD_TOL).is_ok());
        let h = Field2D::from_fn(g, Gauge::Tilde, 0.0, |_, _| 1.0).unwrap();
        assert!(h.check_far_field(FAR_FIELD_TOL).is_err());
    }

    #[test]
    fn trajectory_requires_increasing_times() {
        let g = make_grid(8, 16, 1.0, YScheme::Uniform).unwrap();
        let a = Field2D::zeros(g.clone(), Gauge::Gauged, 0.1);
        let b = Field2D::zeros(g.clone(), Gauge::Gauged, 0.1);
        assert!(Trajectory::new(vec![a.clone(), b]).is_err());
        let c = Field2D::zeros(g, Gauge::Tilde, 0.2);
        assert!(Trajectory::new(vec![a, c]).is_err());
    }
}
