use ndarray::Array2;

use super::EulerTrace;
use crate::error::{Error, Result};
use crate::fields::spectral::{ddx_values, product_dealiased};
use crate::fields::{cumint_values, ddy_wide_values, Field2D, Gauge, YWeight};

/// Bound on `e^Y |u|`; beyond it the gauged field is not decaying fast enough
/// for the nonlinear term to make sense.
pub const DECAY_GUARD: f64 = 1e6;

fn x_row(values: &[f64], ny: usize) -> Array2<f64> {
    Array2::from_shape_fn((values.len(), ny), |(i, _)| values[i])
}

/// `e^Y u`, checked against [`DECAY_GUARD`].
pub(crate) fn undo_decay(u: &Field2D) -> Result<Array2<f64>> {
    let ys = u.grid().y_nodes();
    let mut out = u.values().clone();
    for ((_, j), v) in out.indexed_iter_mut() {
        *v *= ys[j].exp();
        if !(v.abs() <= DECAY_GUARD) {
            return Err(Error::DecayViolation { value: *v, y: ys[j], guard: DECAY_GUARD });
        }
    }
    Ok(out)
}

/// Nonlinear source of the gauged equation:
/// `K = -(e^Y u ∂_x u + u ∂_x U + U ∂_x u) + u + (∫_0^Y e^{Y'} ∂_x u dY' + Y ∂_x U)(∂_Y u + u)`.
pub fn compute_k(u: &Field2D, trace: &EulerTrace, t: f64) -> Result<Field2D> {
    if u.gauge() != Gauge::Gauged {
        return Err(Error::Domain(format!("K needs a gauged field, got {}", u.gauge())));
    }
    let g = u.grid();
    let ny = g.ny();
    let v = u.values();
    let ux = ddx_values(v, 1);
    let big_u = x_row(&trace.sample(g.x_nodes(), t), ny);
    let big_ux = x_row(&trace.sample_ux(g.x_nodes(), t), ny);

    let advect = product_dealiased(&undo_decay(u)?, &ux) + product_dealiased(v, &big_ux) + product_dealiased(&big_u, &ux);
    let mut lift = cumint_values(g, &ux, YWeight::ExpY);
    let ys = g.y_nodes();
    lift.indexed_iter_mut().for_each(|((i, j), l)| *l += ys[j] * big_ux[[i, 0]]);
    let stretch = ddy_wide_values(g, v) + v;
    let k = -advect + v + product_dealiased(&lift, &stretch);
    Ok(u.like(k).with_time(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, YScheme};

    #[test]
    fn zero_field_gives_zero_source() {
        let g = make_grid(16, 32, 15.0, YScheme::Stretched).unwrap();
        let u = Field2D::zeros(g, Gauge::Gauged, 0.0);
        assert_eq!(compute_k(&u, &EulerTrace::cosine(0.1, 1), 0.0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn x_independent_source_is_identity() {
        let g = make_grid(16, 64, 15.0, YScheme::Stretched).unwrap();
        let u = Field2D::from_fn(g, Gauge::Gauged, 0.0, |_, y| 0.1 * y * (-3.0 * y).exp()).unwrap();
        let k = compute_k(&u, &EulerTrace::Constant { value: 0.1 }, 0.0).unwrap();
        assert!(k.max_abs_diff(&u) <= 1e-15);
    }

    #[test]
    fn exponential_mode_closed_form() {
        let (eps, a) = (1e-3, 0.1);
        let g = make_grid(32, 128, 15.0, YScheme::Stretched).unwrap();
        let u = Field2D::from_fn(g, Gauge::Gauged, 0.0, |x, y| eps * (-y).exp() * x.cos()).unwrap();
        let k = compute_k(&u, &EulerTrace::cosine(a, 1), 0.0).unwrap();
        let exact = u.map_xy(|_, x, y| (eps * eps + 2.0 * a * eps) * (-y).exp() * x.cos() * x.sin() + eps * (-y).exp() * x.cos());
        let rel = k.max_abs_diff(&exact) / exact.max_abs();
        assert!(rel <= 1e-8, "{rel}");
    }

    #[test]
    fn polynomial_mode_closed_form() {
        let (eps, a) = (1e-2, 0.05);
        let g = make_grid(32, 256, 15.0, YScheme::Stretched).unwrap();
        let u = Field2D::from_fn(g, Gauge::Gauged, 0.0, |x, y| eps * y * (-2.0 * y).exp() * x.cos()).unwrap();
        let k = compute_k(&u, &EulerTrace::cosine(a, 1), 0.0).unwrap();
        let exact = u.map_xy(|v, x, y| {
            let (c, s) = (x.cos(), x.sin());
            let e = (-y).exp();
            let advect = -eps * eps * y * y * e.powi(3) * c * s - 2.0 * a * eps * y * e * e * c * s;
            let lift = -eps * s * (1.0 - (1.0 + y) * e) - y * a * s;
            -advect + v + lift * eps * c * e * e * (1.0 - y)
        });
        let rel = k.max_abs_diff(&exact) / exact.max_abs();
        assert!(rel <= 1e-6, "{rel}");
    }

    #[test]
    fn decay_guard_trips() {
        let g = make_grid(8, 32, 30.0, YScheme::Uniform).unwrap();
        let u = Field2D::from_fn(g, Gauge::Gauged, 0.0, |_, _| 1e-3).unwrap();
        assert!(matches!(compute_k(&u, &EulerTrace::zero(), 0.0), Err(Error::DecayViolation { .. })));
        let t = u.clone().with_gauge(Gauge::Tilde);
        assert!(compute_k(&t, &EulerTrace::zero(), 0.0).is_err());
    }
}
