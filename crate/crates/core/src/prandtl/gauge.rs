use super::EulerTrace;
use crate::error::{Error, Result};
use crate::fields::{Field2D, Gauge};

fn expect(f: &Field2D, g: Gauge) -> Result<()> {
    if f.gauge() != g {
        return Err(Error::Domain(format!("expected a {g} field, got {}", f.gauge())));
    }
    Ok(())
}

/// `ũ = u^P - U(x, t)`.
pub fn to_tilde(up: &Field2D, trace: &EulerTrace) -> Result<Field2D> {
    expect(up, Gauge::Physical)?;
    let t = up.time();
    Ok(up.map_xy(|v, x, _| v - trace.u(x, t)).with_gauge(Gauge::Tilde))
}

pub fn from_tilde(tilde: &Field2D, trace: &EulerTrace) -> Result<Field2D> {
    expect(tilde, Gauge::Tilde)?;
    let t = tilde.time();
    Ok(tilde.map_xy(|v, x, _| v + trace.u(x, t)).with_gauge(Gauge::Physical))
}

/// `u = e^{-Y} ũ`.
pub fn to_u(tilde: &Field2D) -> Result<Field2D> {
    expect(tilde, Gauge::Tilde)?;
    Ok(tilde.map_xy(|v, _, y| v * (-y).exp()).with_gauge(Gauge::Gauged))
}

pub fn from_u(u: &Field2D) -> Result<Field2D> {
    expect(u, Gauge::Gauged)?;
    Ok(u.map_xy(|v, _, y| v * y.exp()).with_gauge(Gauge::Tilde))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ddy_wide, make_grid, YScheme};

    #[test]
    fn euler_trace_maps_to_zero_and_round_trips() {
        let g = make_grid(16, 32, 10.0, YScheme::Stretched).unwrap();
        let tr = EulerTrace::cosine(0.05, 1);
        let up = Field2D::from_fn(g.clone(), Gauge::Physical, 0.3, |x, _| 0.05 * x.cos()).unwrap();
        assert!(to_tilde(&up, &tr).unwrap().max_abs() == 0.0);
        let f = Field2D::from_fn(g.clone(), Gauge::Physical, 0.3, |x, y| 0.05 * x.cos() + (-y).exp() * x.sin()).unwrap();
        let t = to_tilde(&f, &tr).unwrap();
        assert!(t.max_abs_diff(&t.map_xy(|_, x, y| (-y).exp() * x.sin())) < 1e-16);
        assert!(from_tilde(&t, &tr).unwrap().max_abs_diff(&f) < 1e-16);
        let u = to_u(&t).unwrap();
        assert!(from_u(&u).unwrap().max_abs_diff(&t) <= 1e-15);
        assert!(to_u(&f).is_err());
        assert!(from_u(&t).is_err());
    }

    #[test]
    fn decaying_tilde_becomes_faster_decay() {
        let g = make_grid(8, 32, 10.0, YScheme::Uniform).unwrap();
        let t = Field2D::from_fn(g, Gauge::Tilde, 0.0, |_, y| (-y).exp()).unwrap();
        let u = to_u(&t).unwrap();
        assert!(u.max_abs_diff(&u.map_xy(|_, _, y| (-2.0 * y).exp())) < 1e-16);
    }

    #[test]
    fn robin_becomes_neumann() {
        // ũ = -U(x) e^{-Y²}: ũ - ∂_Y ũ = -U at the wall
        let g = make_grid(16, 128, 15.0, YScheme::Stretched).unwrap();
        let tr = EulerTrace::cosine(0.05, 1);
        let t = Field2D::from_fn(g, Gauge::Tilde, 0.0, |x, y| -tr.u(x, 0.0) * (-y * y).exp()).unwrap();
        let u = to_u(&t).unwrap();
        let d = ddy_wide(&u);
        for (i, &x) in u.grid().x_nodes().iter().enumerate() {
            assert!((d.values()[[i, 0]] - tr.u(x, 0.0)).abs() <= 1e-8);
        }
    }
}
