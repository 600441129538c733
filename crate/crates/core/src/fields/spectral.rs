//! Fourier operations along the periodic x direction.

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::field::Field2D;

/// Signed wavenumber of FFT bin `i`.
pub fn wavenumber(i: usize, nx: usize) -> i64 {
    if i <= nx / 2 {
        i as i64
    } else {
        i as i64 - nx as i64
    }
}

/// Highest wavenumber retained by the 2/3 dealiasing rule.
pub fn dealias_cutoff(nx: usize) -> usize {
    nx / 3
}

/// Forward FFT along x of every Y column: `out[[k, j]]`, unnormalised.
pub fn forward(values: &Array2<f64>) -> Array2<Complex64> {
    let (nx, ny) = values.dim();
    let fft = FftPlanner::new().plan_fft_forward(nx);
    let mut out = Array2::zeros((nx, ny));
    let mut buf = vec![Complex64::new(0.0, 0.0); nx];
    for j in 0..ny {
        for i in 0..nx {
            buf[i] = Complex64::new(values[[i, j]], 0.0);
        }
        fft.process(&mut buf);
        for i in 0..nx {
            out[[i, j]] = buf[i];
        }
    }
    out
}

/// Inverse of [`forward`], keeping the real part.
pub fn inverse(coeffs: &Array2<Complex64>) -> Array2<f64> {
    let (nx, ny) = coeffs.dim();
    let fft = FftPlanner::new().plan_fft_inverse(nx);
    let mut out = Array2::zeros((nx, ny));
    let mut buf = vec![Complex64::new(0.0, 0.0); nx];
    let scale = 1.0 / nx as f64;
    for j in 0..ny {
        for i in 0..nx {
            buf[i] = coeffs[[i, j]];
        }
        fft.process(&mut buf);
        for i in 0..nx {
            out[[i, j]] = buf[i].re * scale;
        }
    }
    out
}

fn apply_multiplier<M: Fn(i64) -> Complex64>(values: &Array2<f64>, m: M) -> Array2<f64> {
    let nx = values.dim().0;
    let mut c = forward(values);
    for (i, mut row) in c.outer_iter_mut().enumerate() {
        let f = m(wavenumber(i, nx));
        row.mapv_inplace(|z| z * f);
    }
    inverse(&c)
}

/// Spectral `∂_x^order`. The Nyquist mode is dropped for odd orders.
pub fn ddx_values(values: &Array2<f64>, order: u32) -> Array2<f64> {
    if order == 0 {
        return values.clone();
    }
    let nx = values.dim().0 as i64;
    apply_multiplier(values, |k| {
        if order % 2 == 1 && k.abs() == nx / 2 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, k as f64).powu(order)
    })
}

/// Spectral x-derivative.
pub fn ddx(f: &Field2D) -> Field2D {
    f.like(ddx_values(f.values(), 1))
}

/// Higher x-derivatives.
pub fn ddx_n(f: &Field2D, order: u32) -> Field2D {
    f.like(ddx_values(f.values(), order))
}

/// Zeroes modes above the 2/3 cutoff.
pub fn dealias_values(values: &Array2<f64>) -> Array2<f64> {
    let nx = values.dim().0;
    let cut = dealias_cutoff(nx) as i64;
    apply_multiplier(values, |k| if k.abs() > cut { Complex64::new(0.0, 0.0) } else { Complex64::new(1.0, 0.0) })
}

pub fn dealias(f: &Field2D) -> Field2D {
    f.like(dealias_values(f.values()))
}

/// Pointwise product under the 2/3 rule: inputs and output truncated.
pub fn product_dealiased(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let pa = dealias_values(a);
    let pb = dealias_values(b);
    dealias_values(&(&pa * &pb))
}

/// `|f̂(k, Y)|` for `k = 0..=Nx/2`, normalised so a unit cosine has
/// amplitude 1/2 in mode 1.
pub fn amplitudes(values: &Array2<f64>) -> Array2<f64> {
    let (nx, ny) = values.dim();
    let c = forward(values);
    Array2::from_shape_fn((nx / 2 + 1, ny), |(k, j)| c[[k, j]].norm() / nx as f64)
}

/// Trigonometric interpolation of x-rows onto a finer periodic grid.
pub fn refine_x(values: &Array2<f64>, nx_fine: usize) -> Array2<f64> {
    let (nx, ny) = values.dim();
    if nx_fine == nx {
        return values.clone();
    }
    let c = forward(values);
    let mut fine = Array2::<Complex64>::zeros((nx_fine, ny));
    let scale = nx_fine as f64 / nx as f64;
    for i in 0..nx {
        let k = wavenumber(i, nx);
        let mut z = c.row(i).to_owned();
        if k.unsigned_abs() as usize == nx / 2 {
            // split Nyquist between ±k
            z.mapv_inplace(|v| v * 0.5);
            let neg = (nx_fine as i64 - k) as usize;
            for j in 0..ny {
                fine[[neg, j]] += z[j] * scale;
            }
        }
        let dst = if k >= 0 { k as usize } else { (nx_fine as i64 + k) as usize };
        for j in 0..ny {
            fine[[dst, j]] += z[j] * scale;
        }
    }
    inverse(&fine)
}
