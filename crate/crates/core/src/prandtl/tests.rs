use super::*;
use crate::error::Error;
use crate::fields::spectral::forward;
use crate::fields::{make_grid, wall_slope, Field2D, Gauge, Trajectory, YScheme};
use crate::kernels::{apply_e1, e1_of_linear};

fn default_case(cfg: &SolverConfig) -> (Field2D, EulerTrace) {
    let tr = EulerTrace::cosine(0.05, 1);
    let u0 = InitialProfile::Compatible { decay: 3.0, bump: 0.02, radius: 1.0 }.field(&cfg.grid().unwrap(), &tr).unwrap();
    (u0, tr)
}

#[test]
fn zero_data_gives_zero_solution() {
    let cfg = SolverConfig { nx: 8, ny: 32, ..Default::default() };
    let u0 = Field2D::zeros(cfg.grid().unwrap(), Gauge::Gauged, 0.0);
    let (traj, states) = picard_solve(&u0, &EulerTrace::zero(), &cfg).unwrap();
    assert!(traj.snapshots().iter().all(|s| s.max_abs() == 0.0));
    assert!(states.iter().all(|s| s.converged && s.iterate_index == 1));
    assert_eq!(traj.len(), cfg.steps + 1);
}

#[test]
fn incompatible_data_is_rejected() {
    let cfg = SolverConfig { nx: 8, ny: 32, ..Default::default() };
    let u0 = Field2D::from_fn(cfg.grid().unwrap(), Gauge::Gauged, 0.0, |_, y| y * (-3.0 * y).exp()).unwrap();
    let r = picard_solve(&u0, &EulerTrace::zero(), &cfg);
    assert!(matches!(r, Err(Error::Compatibility(_))));
}

#[test]
fn bad_chunking_is_a_config_error() {
    let cfg = SolverConfig { chunk_t: 0.0333, ..Default::default() };
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    let cfg = SolverConfig { picard_tol: 2.0, ..Default::default() };
    assert!(cfg.validate().is_err());
}

#[test]
fn linear_part_with_constant_trace() {
    // u0 = c Y e^{-Y²/4}: 𝒰 = E1(u0) - c E1(t)Y + cY
    let c = 0.1;
    let g = make_grid(8, 128, 15.0, YScheme::Stretched).unwrap();
    let tr = EulerTrace::Constant { value: c };
    let u0 = Field2D::from_fn(g.clone(), Gauge::Gauged, 0.0, |_, y| c * y * (-y * y / 4.0).exp()).unwrap();
    let t = 0.05;
    let cu = compute_cal_u(&u0, &tr, t).unwrap();
    let e1 = apply_e1(&u0, t).unwrap();
    let expect = e1.map_xy(|v, _, y| v - c * e1_of_linear(y, t) + c * y);
    assert!(cu.max_abs_diff(&expect) <= 1e-14);
    for s in wall_slope(&cu, 3) {
        assert!((s - c).abs() <= 1e-3);
    }
}

#[test]
fn linear_part_boundary_trace_with_unsteady_trace() {
    let g = make_grid(16, 128, 15.0, YScheme::Stretched).unwrap();
    let tr = EulerTrace::Fourier { modes: vec![FourierMode { k: 1, cos: vec![0.05, 0.5], sin: vec![] }] };
    let u0 = InitialProfile::Compatible { decay: 3.0, bump: 0.0, radius: 1.0 }.field(&g, &tr).unwrap();
    let t = 0.1;
    let cu = compute_cal_u(&u0, &tr, t).unwrap();
    for (s, &x) in wall_slope(&cu, 3).iter().zip(g.x_nodes()) {
        assert!((s - tr.u(x, t)).abs() <= 1e-3, "{s} vs {}", tr.u(x, t));
    }
}

#[test]
fn zero_history_maps_to_linear_part() {
    let g = make_grid(8, 64, 15.0, YScheme::Stretched).unwrap();
    let tr = EulerTrace::Constant { value: 0.0 };
    let hist = Trajectory::new((0..=4).map(|k| Field2D::zeros(g.clone(), Gauge::Gauged, 0.01 * k as f64)).collect()).unwrap();
    assert_eq!(apply_f(&hist, &tr, 0.04).unwrap().max_abs(), 0.0);
}

#[test]
fn default_scenario_contracts() {
    let cfg = SolverConfig::default();
    let (u0, tr) = default_case(&cfg);
    let (traj, states) = picard_solve(&u0, &tr, &cfg).unwrap();
    for s in &states {
        eprintln!("{:?}", s.residual_history);
        eprintln!("{:?}", s.contraction_ratios);
        assert!(s.converged && s.iterate_index <= 10);
        assert!(s.contraction_ratios.iter().skip(1).all(|r| *r < 0.5));
    }
    let (up, vp) = reconstruct(&traj, &tr).unwrap();
    let r = residual_prandtl(&up, &vp, &tr).unwrap();
    eprintln!("{r:?}");
    assert!(r.robin_max <= 1e-3 && r.far_field_max <= 1e-8 && r.divergence_max <= 1e-8);
}

#[test]
fn odd_data_stays_odd() {
    // (x, u) -> (-x, -u) is a symmetry, so sine-series data keeps only sine modes
    let cfg = SolverConfig { nx: 16, ny: 64, steps: 10, ..Default::default() };
    let tr = EulerTrace::Fourier { modes: vec![FourierMode { k: 1, cos: vec![], sin: vec![0.05] }] };
    let u0 = InitialProfile::Compatible { decay: 3.0, bump: 0.0, radius: 1.0 }.field(&cfg.grid().unwrap(), &tr).unwrap();
    let (traj, _) = picard_solve(&u0, &tr, &cfg).unwrap();
    for snap in traj.snapshots() {
        let c = forward(snap.values());
        let scale: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        let even: f64 = c.iter().map(|z| z.re * z.re).sum();
        assert!(even <= 1e-24 * scale.max(1e-300), "{even} of {scale}");
    }
}
