use std::f64::consts::PI;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Exponent beyond which kernel values are flushed to zero.
pub const UNDERFLOW_EXPONENT: f64 = 700.0;

/// Heat kernel without the domain check; `t > 0` is the caller's contract.
#[inline]
pub(crate) fn heat(y: f64, t: f64) -> f64 {
    let a = y * y / (4.0 * t);
    if a > UNDERFLOW_EXPONENT {
        0.0
    } else {
        (-a).exp() / (4.0 * PI * t).sqrt()
    }
}

/// `E(Y, t) = (4πt)^{-1/2} exp(-Y²/4t)`.
pub fn eval_e(y: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat kernel needs t > 0, got {t}")));
    }
    Ok(heat(y, t))
}

/// `H(Y, t) = (Y/t) E(Y, t)`, the flux kernel; equals `-2 ∂_Y E`.
pub fn eval_h(y: f64, t: f64) -> Result<f64> {
    Ok(y / t * eval_e(y, t)?)
}

/// Reflected propagator applied to the linear profile `Y`:
/// `Y + 2√(t/π) e^{-Y²/4t} - Y erfc(Y/√(4t))`.
///
/// The Gaussian term enters with a plus sign: the reflected kernel is
/// positive, so `E1(t)Y` at the wall is the mean of `|Y'|`, i.e. `2√(t/π)`.
pub fn e1_of_linear(y: f64, t: f64) -> f64 {
    y - linear_defect(y, t)
}

/// `Y - E_1(t)Y`, the boundary-layer correction of the linear profile.
pub fn linear_defect(y: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let r = y / (4.0 * t).sqrt();
    let g = if r * r > UNDERFLOW_EXPONENT { 0.0 } else { (-r * r).exp() };
    y * erfc(r) - 2.0 * (t / PI).sqrt() * g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_normalisation_points() {
        assert!((eval_e(0.0, 1.0 / (4.0 * PI)).unwrap() - 1.0).abs() < 1e-15);
        let e = eval_e(2.0, 1.0).unwrap();
        assert!((e - (-1.0f64).exp() / (4.0 * PI).sqrt()).abs() < 1e-16);
        assert!(matches!(eval_e(1.0, 0.0), Err(Error::Domain(_))));
        assert!(eval_h(1.0, -1.0).is_err());
        assert_eq!(eval_e(100.0, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn linear_profile_has_neumann_trace_and_wall_mean() {
        let t = 0.05;
        assert!((e1_of_linear(0.0, t) - 2.0 * (t / PI).sqrt()).abs() < 1e-15);
        let h = 1e-5;
        assert!(((e1_of_linear(h, t) - e1_of_linear(0.0, t)) / h).abs() < 1e-3);
        assert!((e1_of_linear(20.0, t) - 20.0).abs() < 1e-14);
    }

    #[test]
    fn flux_kernel_is_minus_twice_y_derivative() {
        for &(y, t) in &[(0.3f64, 0.1f64), (1.0, 0.5), (2.5, 1.7), (0.05, 0.01)] {
            let h = 1e-6 * t.sqrt();
            let fd = (eval_e(y + h, t).unwrap() - eval_e(y - h, t).unwrap()) / (2.0 * h);
            let scale = eval_h(y, t).unwrap().abs().max(1e-3);
            assert!((eval_h(y, t).unwrap() + 2.0 * fd).abs() / scale <= 1e-6);
        }
    }
}
