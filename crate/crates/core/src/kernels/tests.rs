use std::f64::consts::PI;

use super::verify::double_layer_oracle;
use super::*;
use crate::fields::{make_grid, wall_slope, Gauge, YScheme};

fn grid(ny: usize, s: YScheme) -> Arc<Grid> {
    make_grid(8, ny, 15.0, s).unwrap()
}

fn gaussian(g: &Arc<Grid>) -> Field2D {
    Field2D::from_fn(g.clone(), Gauge::Gauged, 0.0, |_, y| (-y * y / 4.0).exp()).unwrap()
}

fn rel_sup(a: &Field2D, exact: &Field2D) -> f64 {
    a.max_abs_diff(exact) / exact.max_abs()
}

fn ramp(g: &Arc<Grid>, dt: f64, steps: usize, f: impl Fn(f64, f64, f64) -> f64) -> Trajectory {
    let snaps = (0..=steps)
        .map(|k| {
            let t = k as f64 * dt;
            Field2D::from_fn(g.clone(), Gauge::Gauged, t, |x, y| f(x, y, t)).unwrap()
        })
        .collect();
    Trajectory::new(snaps).unwrap()
}

#[test]
fn flux_kernel_integrates_to_twice_heat_kernel() {
    let rule = UnitRule::gauss_legendre(20);
    for &(y, tau) in &[(0.0f64, 0.1f64), (0.4, 0.01), (1.5, 1.0), (3.0, 0.7)] {
        let h = (4.0 * tau).sqrt();
        let q: f64 = (0..40)
            .map(|p| {
                let a = y + p as f64 * 0.25 * h;
                rule.integrate(a, a + 0.25 * h, |z| eval_h(z, tau).unwrap())
            })
            .sum();
        assert!((q - 2.0 * eval_e(y, tau).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn e1_of_linear_profile_closed_form() {
    let g = grid(128, YScheme::Stretched);
    let u0 = Field2D::from_fn(g.clone(), Gauge::Gauged, 0.0, |_, y| y).unwrap();
    for &t in &[1e-3, 0.05, 0.1] {
        let v = apply_e1(&u0, t).unwrap();
        for (j, &y) in g.y_nodes().iter().enumerate().filter(|(_, y)| **y <= 7.5) {
            assert!((v.values()[[0, j]] - e1_of_linear(y, t)).abs() <= 1e-8, "t {t} Y {y}");
        }
    }
}

#[test]
fn e1_of_gaussian_closed_form() {
    let g = grid(128, YScheme::Stretched);
    let u0 = gaussian(&g);
    let t: f64 = 0.1;
    let exact = u0.map_xy(|_, _, y| (1.0 + t).powf(-0.5) * (-y * y / (4.0 * (1.0 + t))).exp());
    let v = apply_e1(&u0, t).unwrap().with_time(0.0);
    assert!(rel_sup(&v, &exact) <= 1e-7, "{}", rel_sup(&v, &exact));
}

#[test]
fn e1_small_time_is_identity() {
    let g = grid(128, YScheme::Stretched);
    let u0 = Field2D::from_fn(g, Gauge::Gauged, 0.0, |x, y| x.cos() * (-y * y).exp()).unwrap();
    let v = apply_e1(&u0, 1e-6).unwrap();
    assert!(v.max_abs_diff(&u0) <= 1e-4);
    assert!(apply_e1(&u0, 0.0).is_err());
}

#[test]
fn e1_semigroup_and_maximum_principle() {
    let g = grid(128, YScheme::Stretched);
    let u0 = Field2D::from_fn(g, Gauge::Gauged, 0.0, |x, y| (1.0 + 0.5 * x.sin()) * (-y * y / 2.0).exp()).unwrap();
    let a = apply_e1(&apply_e1(&u0, 0.03).unwrap(), 0.05).unwrap();
    let b = apply_e1(&u0, 0.08).unwrap();
    assert!(a.max_abs_diff(&b) <= 1e-8, "{}", a.max_abs_diff(&b));
    for &t in &[1e-4, 0.01, 0.1, 1.0] {
        assert!(apply_e1(&u0, t).unwrap().max_abs() <= u0.max_abs() + 1e-10);
    }
}

fn linear_datum(g: &Arc<Grid>, t: f64, samples: usize) -> XSeries {
    verify::linear_datum(g, t, samples).unwrap()
}

#[test]
fn e2_of_linear_datum_at_wall() {
    let g = grid(128, YScheme::Stretched);
    let t: f64 = 0.1;
    let v = apply_e2(&g, &linear_datum(&g, t, 20), t).unwrap();
    let exact = -4.0 / (3.0 * PI.sqrt()) * t.powf(1.5);
    let oracle = double_layer_oracle(0.0, t, |s| s);
    assert!(((oracle - exact) / exact).abs() <= 1e-6, "oracle {oracle} vs {exact}");
    assert!(((v.values()[[0, 0]] - oracle) / oracle).abs() <= 1e-6);
}

#[test]
fn e2_reduction_matches_double_integral_off_wall() {
    let g = grid(128, YScheme::Stretched);
    let t: f64 = 0.1;
    let v = apply_e2(&g, &linear_datum(&g, t, 20), t).unwrap();
    for j in [5, 20, 40] {
        let y = g.y_nodes()[j];
        let o = double_layer_oracle(y, t, |s| s);
        assert!(((v.values()[[3, j]] - o) / o).abs() <= 1e-6, "Y {y}: {} vs {o}", v.values()[[3, j]]);
    }
}

#[test]
fn e2_neumann_jump() {
    let g = grid(128, YScheme::Stretched);
    let t: f64 = 0.1;
    let v = apply_e2(&g, &linear_datum(&g, t, 20), t).unwrap();
    for s in wall_slope(&v, 3) {
        assert!((s - t).abs() <= 1e-3, "{s}");
    }
}

#[test]
fn e2_zero_and_incompatible_data() {
    let g = grid(32, YScheme::Stretched);
    let zero = XSeries::from_fn(vec![0.0, 0.05, 0.1], g.x_nodes(), |_, _| 0.0).unwrap();
    assert_eq!(apply_e2(&g, &zero, 0.1).unwrap().max_abs(), 0.0);
    let bad = XSeries::from_fn(vec![0.0, 0.05, 0.1], g.x_nodes(), |x, _| x.cos()).unwrap();
    assert!(matches!(apply_e2(&g, &bad, 0.1), Err(Error::Compatibility(_))));
}

#[test]
fn e3_of_constant_source_is_elapsed_time() {
    let g = grid(64, YScheme::Stretched);
    let src = ramp(&g, 0.01, 10, |_, _, _| 1.0);
    let v = apply_e3(&src, 0.1).unwrap();
    assert!(v.values().iter().all(|v| (v - 0.1).abs() <= 1e-10));
    let zero = ramp(&g, 0.01, 4, |_, _, _| 0.0);
    assert_eq!(apply_e3(&zero, 0.04).unwrap().max_abs(), 0.0);
}

#[test]
fn e3_of_gaussian_source() {
    let g = grid(128, YScheme::Stretched);
    let t: f64 = 0.1;
    let src = ramp(&g, 0.005, 20, |_, y, _| (-y * y / 4.0).exp());
    let v = apply_e3(&src, t).unwrap();
    let rule = UnitRule::gauss_legendre(30);
    let exact = v.map_xy(|_, _, y| rule.integrate(0.0, t, |tau| (1.0 + tau).powf(-0.5) * (-y * y / (4.0 * (1.0 + tau))).exp()));
    assert!(rel_sup(&v, &exact) <= 1e-6, "{}", rel_sup(&v, &exact));
}

#[test]
fn e3_missing_history() {
    let g = grid(32, YScheme::Stretched);
    let src = ramp(&g, 0.01, 4, |_, _, _| 1.0);
    assert!(matches!(apply_e3(&src, 0.05), Err(Error::Domain(_))));
}

#[test]
fn e3_dy_paths_agree() {
    let g = grid(128, YScheme::Stretched);
    let u = ramp(&g, 0.005, 20, |_, y, _| (-y).exp());
    let a = apply_e3_dy(&u, 0.1, DyPath::Direct).unwrap();
    let b = apply_e3_dy(&u, 0.1, DyPath::ByParts).unwrap();
    assert!(a.max_abs_diff(&b) <= 1e-5, "{}", a.max_abs_diff(&b));

    let c = ramp(&g, 0.005, 20, |x, _, t| 0.3 + x.sin() * (1.0 + t));
    assert!(apply_e3_dy(&c, 0.1, DyPath::Direct).unwrap().max_abs() <= 1e-10);
    assert!(apply_e3_dy(&c, 0.1, DyPath::ByParts).unwrap().max_abs() <= 1e-6);
}

#[test]
fn verification_suite_passes() {
    for r in run_identities(None, None).unwrap() {
        eprintln!("{:<24} {:>12.3e} {:?} {:e}", r.name, r.value, r.check, r.tolerance);
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn zero_tolerance_fails_and_filter_selects_one() {
    let r = run_identities(Some("e1_gaussian"), Some(0.0)).unwrap();
    assert_eq!(r.len(), 1);
    assert!(!r[0].passed);
    assert!(run_identities(Some("no_such_identity"), None).unwrap().is_empty());
}
