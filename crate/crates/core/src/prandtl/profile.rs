use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::EulerTrace;
use crate::error::Result;
use crate::fields::{Field2D, Gauge, Grid};

/// Named gauged initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialProfile {
    Zero,
    /// `u0 = U(x, 0) Y e^{-aY} + b Y² e^{-aY} h(x)` with the Poisson-kernel
    /// profile `h(x) = (1 - r²)/(1 - 2r cos x + r²) - 1`, `r = e^{-ρ}`.
    ///
    /// The `Y` term carries the Neumann trace `U(x, 0)`; the `Y²` term has
    /// none, so compatibility holds for any `b`. `h` has Fourier coefficients
    /// `2r^k`, giving x-analyticity radius exactly `ρ`.
    Compatible {
        decay: f64,
        #[serde(default)]
        bump: f64,
        #[serde(default = "default_radius")]
        radius: f64,
    },
}

fn default_radius() -> f64 {
    1.0
}

pub fn poisson_profile(x: f64, radius: f64) -> f64 {
    let r = (-radius).exp();
    (1.0 - r * r) / (1.0 - 2.0 * r * x.cos() + r * r) - 1.0
}

impl InitialProfile {
    pub fn field(&self, grid: &Arc<Grid>, trace: &EulerTrace) -> Result<Field2D> {
        match *self {
            InitialProfile::Zero => Ok(Field2D::zeros(grid.clone(), Gauge::Gauged, 0.0)),
            InitialProfile::Compatible { decay, bump, radius } => Field2D::from_fn(grid.clone(), Gauge::Gauged, 0.0, |x, y| {
                let e = (-decay * y).exp();
                trace.u(x, 0.0) * y * e + bump * y * y * e * poisson_profile(x, radius)
            }),
        }
    }
}
