//! Exact position-space sinc kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{KernelMatrix, WaveFunction, Window};
use crate::error::{check_time, Result};

/// Pad that keeps the per-column sinc tail below `1e-4`.
pub const DEFAULT_PAD: u64 = 2048;

/// `sin(πx)` with argument reduction about the nearest integer. Exactly zero
/// at integers.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    if r == 0.0 {
        return 0.0;
    }
    let s = (PI * r).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// Split `t` into its nearest integer and the remainder in `[-1/2, 1/2]`.
fn split_time(t: f64) -> (i64, f64) {
    let n = t.round();
    (n as i64, t - n)
}

/// `(U_t)_{l j} = sinc(π(j + t - l))`.
///
/// Evaluated as `(-1)^{j-l} sin(πt) / (π(j - l + t))`, which keeps full
/// relative accuracy far from the diagonal. For integer `t` the value is
/// exactly `δ_{j+t, l}`.
pub fn sinc_shift_coeff(j: i64, t: f64, l: i64) -> f64 {
    let (n, frac) = split_time(t);
    if frac == 0.0 {
        return if j + n == l { 1.0 } else { 0.0 };
    }
    let sin_t = sin_pi(t);
    coeff_with(j - l, t, sin_t)
}

#[inline]
fn coeff_with(d: i64, t: f64, sin_t: f64) -> f64 {
    let x = d as f64 + t;
    let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * sin_t / (PI * x)
}

/// Upper estimate of the squared sinc mass lost by a column truncated `pad`
/// sites beyond its own site on both sides: `2 sin²(πt) / (π² pad)`.
pub fn sinc_tail_bound(t: f64, pad: u64) -> f64 {
    if pad == 0 {
        return 1.0;
    }
    let s = sin_pi(t);
    2.0 * s * s / (PI * PI * pad as f64)
}

/// Truncation of `U_t` from `in_window` to `in_window` padded by `pad`.
pub fn build_shift_kernel(t: f64, in_window: Window, pad: u64) -> Result<KernelMatrix> {
    check_time(t)?;
    let rows = in_window.padded(pad);
    let (n, frac) = split_time(t);
    let sin_t = sin_pi(t);
    let zero = Complex64::new(0.0, 0.0);
    Ok(KernelMatrix::from_fn(rows, in_window, |l, j| {
        if frac == 0.0 {
            if j + n == l {
                Complex64::new(1.0, 0.0)
            } else {
                zero
            }
        } else {
            Complex64::new(coeff_with(j - l, t, sin_t), 0.0)
        }
    }))
}

/// `U_t f` on `f.window()` padded by `pad`, without materializing the kernel.
pub fn apply_shift_exact(f: &WaveFunction, t: f64, pad: u64) -> Result<WaveFunction> {
    check_time(t)?;
    let out_window = f.window().padded(pad);
    let (n, frac) = split_time(t);
    if frac == 0.0 {
        return Ok(WaveFunction::from_fn(out_window, |l| f.amplitude(l - n)));
    }
    let sin_t = sin_pi(t);
    let mut out = vec![Complex64::new(0.0, 0.0); out_window.size()];
    for (j, a) in f.window().sites().zip(f.amplitudes()) {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (l, o) in out_window.sites().zip(out.iter_mut()) {
            *o += a * coeff_with(j - l, t, sin_t);
        }
    }
    WaveFunction::new(out_window, out)
}

/// Same truncated kernel as [`apply_shift_exact`], summed as one linear
/// convolution through zero-padded FFTs. `O(n log n)` in the output size
/// instead of `O(n · support)`; agrees with the direct sum to rounding.
pub fn apply_shift_convolved(f: &WaveFunction, t: f64, pad: u64) -> Result<WaveFunction> {
    check_time(t)?;
    let (_, frac) = split_time(t);
    if frac == 0.0 {
        return apply_shift_exact(f, t, pad);
    }
    let out_window = f.window().padded(pad);
    let n = f.window().size();
    let out_len = out_window.size();
    // out_o = Σ_i f_i κ_{o - i + n - 1} with κ_r = c(n - 1 + pad - r)
    let kernel_len = out_len + n - 1;
    let fft_len = (n + kernel_len - 1).next_power_of_two();
    let sin_t = sin_pi(t);
    let zero = Complex64::new(0.0, 0.0);

    let mut a = vec![zero; fft_len];
    a[..n].copy_from_slice(f.amplitudes());
    let mut b = vec![zero; fft_len];
    let offset = (n - 1) as i64 + pad as i64;
    for (r, v) in b.iter_mut().take(kernel_len).enumerate() {
        *v = Complex64::new(coeff_with(offset - r as i64, t, sin_t), 0.0);
    }

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(fft_len);
    forward.process(&mut a);
    forward.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    planner.plan_fft_inverse(fft_len).process(&mut a);
    let scale = 1.0 / fft_len as f64;
    let amplitudes = a[n - 1..n - 1 + out_len]
        .iter()
        .map(|v| v * scale)
        .collect();
    WaveFunction::new(out_window, amplitudes)
}
