use serde::{Deserialize, Serialize};

/// One Fourier mode of the Euler trace; `cos` and `sin` hold polynomial
/// coefficients in `t` (lowest degree first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: u32,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

/// Tangential Euler velocity at the wall, `U(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EulerTrace {
    Constant { value: f64 },
    Fourier { modes: Vec<FourierMode> },
}

fn poly(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a)
}

fn dpoly(c: &[f64], t: f64) -> f64 {
    c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (n, a)| acc * t + n as f64 * a)
}

impl EulerTrace {
    pub fn zero() -> Self {
        EulerTrace::Constant { value: 0.0 }
    }

    /// Time-independent `a cos(kx)`.
    pub fn cosine(a: f64, k: u32) -> Self {
        EulerTrace::Fourier { modes: vec![FourierMode { k, cos: vec![a], sin: vec![] }] }
    }

    pub fn is_x_independent(&self) -> bool {
        match self {
            EulerTrace::Constant { .. } => true,
            EulerTrace::Fourier { modes } => modes.iter().all(|m| m.k == 0 || m.sin.iter().chain(&m.cos).all(|c| *c == 0.0)),
        }
    }

    fn eval(&self, x: f64, t: f64, dx: u32, dt: bool) -> f64 {
        match self {
            EulerTrace::Constant { value } => {
                if dx == 0 && !dt {
                    *value
                } else {
                    0.0
                }
            }
            EulerTrace::Fourier { modes } => modes
                .iter()
                .map(|m| {
                    let k = m.k as f64;
                    let (a, b) = if dt { (dpoly(&m.cos, t), dpoly(&m.sin, t)) } else { (poly(&m.cos, t), poly(&m.sin, t)) };
                    let (c, s) = ((k * x).cos(), (k * x).sin());
                    match dx {
                        0 => a * c + b * s,
                        1 => k * (b * c - a * s),
                        _ => unreachable!("only first x-derivatives are provided"),
                    }
                })
                .sum(),
        }
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        self.eval(x, t, 0, false)
    }

    pub fn ux(&self, x: f64, t: f64) -> f64 {
        self.eval(x, t, 1, false)
    }

    pub fn ut(&self, x: f64, t: f64) -> f64 {
        self.eval(x, t, 0, true)
    }

    /// Bernoulli pressure gradient `∂_x p = -(∂_t U + U ∂_x U)`.
    pub fn px(&self, x: f64, t: f64) -> f64 {
        -(self.ut(x, t) + self.u(x, t) * self.ux(x, t))
    }

    pub fn sample(&self, xs: &[f64], t: f64) -> Vec<f64> {
        xs.iter().map(|&x| self.u(x, t)).collect()
    }

    pub fn sample_ux(&self, xs: &[f64], t: f64) -> Vec<f64> {
        xs.iter().map(|&x| self.ux(x, t)).collect()
    }
}
