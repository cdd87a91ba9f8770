//! Self-adjoint generator of the flow and its truncated exponentials.
//!
//! The generator is multiplication by `k` in momentum space. In position
//! space its kernel is
//!
//! ```text
//! h[j, m] = (1/2π) ∫_{-π}^{π} k e^{i(m-j)k} dk = i (-1)^{j-m} / (j - m),   h[j, j] = 0.
//! ```
//!
//! The `1/2π` is the normalization of the inverse Fourier transform; it is
//! exactly what makes `e^{ith}` reproduce the sinc kernel in the large-window
//! limit. Without it the kernel would be `-2π` times larger.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{KernelMatrix, Window};
use crate::error::{check_time, Error, Result};
use crate::linalg::HermitianEigen;

/// Largest window [`GeneratorFlow`] will diagonalize by default.
pub const DEFAULT_DENSE_LIMIT: usize = 2048;

fn generator_entry(j: i64, m: i64) -> Complex64 {
    let d = j - m;
    if d == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Complex64::new(0.0, sign / d as f64)
}

/// Truncation `h_W` of the generator to `window`.
pub fn generator_kernel(window: Window) -> KernelMatrix {
    KernelMatrix::from_fn(window, window, generator_entry)
}

/// `e^{ith_W}` for many `t` from a single eigendecomposition.
#[derive(Debug, Clone)]
pub struct GeneratorFlow {
    window: Window,
    eigen: HermitianEigen,
}

impl GeneratorFlow {
    pub fn new(window: Window) -> Result<Self> {
        Self::with_limit(window, DEFAULT_DENSE_LIMIT)
    }

    pub fn with_limit(window: Window, limit: usize) -> Result<Self> {
        if window.size() > limit {
            return Err(Error::WindowTooLarge {
                size: window.size(),
                limit,
            });
        }
        let h = generator_kernel(window);
        let eigen = HermitianEigen::new(h.entries())?;
        Ok(Self { window, eigen })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Spectrum of `h_W`, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        self.eigen.eigenvalues()
    }

    pub fn propagator(&self, t: f64) -> Result<KernelMatrix> {
        check_time(t)?;
        KernelMatrix::new(self.window, self.window, self.eigen.exp_i(t))
    }

    /// Fermi function of the truncated generator, `(1 + e^{β h_W})^{-1}`.
    pub(crate) fn fermi_function(&self, beta: f64) -> KernelMatrix {
        let m = self
            .eigen
            .map(|lambda| Complex64::new(fermi(beta, lambda), 0.0));
        KernelMatrix::new(self.window, self.window, m).expect("square window")
    }
}

/// `1 / (1 + e^{βk})` without overflow.
pub(crate) fn fermi(beta: f64, k: f64) -> f64 {
    let x = beta * k;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// `e^{ith_W}` through a Hermitian eigendecomposition.
pub fn expm_generator(window: Window, t: f64) -> Result<KernelMatrix> {
    check_time(t)?;
    GeneratorFlow::new(window)?.propagator(t)
}

/// `(e_{-m}, U_t e_n) = (-1)^{m+n} sin(πt) / (π(m + t + n))` for `m, n ≥ 1`.
///
/// This is the sinc kernel entry from site `n` to site `-m`; the entries
/// form the off-diagonal corner whose Hilbert–Schmidt norm is summed in
/// [`crate::implementability`].
pub fn matrix_element_u(m: u64, n: u64, t: f64) -> Result<Complex64> {
    check_time(t)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "matrix_element_u needs m, n >= 1 (got m = {m}, n = {n})"
        )));
    }
    let s = super::sin_pi(t);
    if s == 0.0 {
        // integer t: the kernel is a permutation, hit only when n + t = -m
        let hit = (n as f64 + t + m as f64) == 0.0;
        return Ok(Complex64::new(if hit { 1.0 } else { 0.0 }, 0.0));
    }
    let sign = if (m + n).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(Complex64::new(sign * s / (PI * ((m + n) as f64 + t)), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_residual, max_abs, unitarity_residual};
    use crate::one_particle::sinc_shift_coeff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_entries() {
        let w = Window::new(-6, 6).unwrap();
        let h = generator_kernel(w);
        for j in w.sites() {
            assert_eq!(h.entry(j, j), Complex64::new(0.0, 0.0));
        }
        assert_eq!(h.entry(2, 3), Complex64::new(0.0, 1.0));
        assert_eq!(h.entry(3, 2), Complex64::new(0.0, -1.0));
        assert_eq!(hermiticity_residual(h.entries()), 0.0);
    }

    #[test]
    fn kernel_is_momentum_integral() {
        // (1/2π)∫ k e^{i(m-j)k} dk by composite Simpson
        let n = 20_000;
        let step = 2.0 * PI / n as f64;
        for d in [1i64, 2, 3, -5] {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..=n {
                let k = -PI + i as f64 * step;
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += Complex64::from_polar(k, d as f64 * k) * w;
            }
            let integral = acc * (step / 3.0) / (2.0 * PI);
            assert!((integral - generator_entry(0, d)).norm() < 1e-9, "d = {d}");
        }
    }

    #[test]
    fn spectrum_inside_momentum_range() {
        let flow = GeneratorFlow::new(Window::new(0, 511).unwrap()).unwrap();
        assert!(flow.eigenvalues().iter().all(|l| l.abs() <= PI + 1e-6));
    }

    #[test]
    fn propagator_group_law() {
        let flow = GeneratorFlow::new(Window::centered(20)).unwrap();
        let id = flow.propagator(0.0).unwrap();
        assert!(max_abs(&(id.entries() - nalgebra::DMatrix::identity(41, 41))) < 1e-12);
        let a = flow.propagator(0.4).unwrap();
        let b = flow.propagator(1.1).unwrap();
        let ab = a.compose(&b).unwrap();
        let c = flow.propagator(1.5).unwrap();
        assert!(ab.max_abs_diff(&c).unwrap() < 1e-9);
        assert!(unitarity_residual(c.entries()) < 1e-10);
    }

    #[test]
    fn propagator_is_real() {
        // i·h_W is real, hence so is e^{ith_W}
        let u = expm_generator(Window::centered(10), 0.7).unwrap();
        assert!(u.entries().iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn oversized_window_rejected() {
        let w = Window::new(0, 99).unwrap();
        assert_eq!(
            GeneratorFlow::with_limit(w, 64).unwrap_err(),
            Error::WindowTooLarge {
                size: 100,
                limit: 64
            }
        );
    }

    #[test]
    fn matrix_element_closed_form() {
        assert_eq!(
            matrix_element_u(3, 4, 2.0).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let v = matrix_element_u(1, 1, 0.5).unwrap();
        assert!((v.re - 1.0 / (2.5 * PI)).abs() < 1e-15);
        assert!((v.re - 0.127324).abs() < 1e-6);
        assert!(matrix_element_u(0, 1, 0.5).is_err());
    }

    #[test]
    fn matrix_element_is_sinc_entry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = rng.random_range(1..200u64);
            let n = rng.random_range(1..200u64);
            let t = rng.random_range(-1.9..6.0);
            let a = matrix_element_u(m, n, t).unwrap().re;
            let b = sinc_shift_coeff(n as i64, t, -(m as i64));
            assert!((a - b).abs() < 1e-14, "m={m} n={n} t={t}");
        }
    }
}
