//! Periodic FFT route for `U_t`. Fast, approximate, never the reference.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{WaveFunction, Window};
use crate::error::{check_time, Error, Result};

/// Uniform momentum grid on `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumGrid {
    n_points: usize,
}

impl MomentumGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidArgument(
                "momentum grid needs at least one point".into(),
            ));
        }
        Ok(Self { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// `k_m = -π + 2πm/N`.
    pub fn node(&self, m: usize) -> f64 {
        -PI + 2.0 * PI * m as f64 / self.n_points as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|m| self.node(m))
    }

    /// Midpoint of the cell `[k_m, k_{m+1})`. The cell midpoints are
    /// symmetric about `k = 0`, so multipliers evaluated there keep the
    /// position-space kernel real.
    pub fn cell_midpoint(&self, m: usize) -> f64 {
        self.node(m) + PI / self.n_points as f64
    }
}

/// `U_t f` on a ring of `grid.n_points()` sites.
///
/// The input is zero-padded to the grid, transformed with
/// `f̃(k) = Σ_j f_j e^{ijk}`, multiplied by the unimodular phase
/// `e^{itκ_m}` at the cell midpoints `κ_m`, and transformed back. The output
/// window has `grid.n_points()` sites centred on the input window. With
/// midpoint phases the ring closes with a sign `(-1)^{N+1}` on wrap-around;
/// integer `t` is an exact (signed) circular shift.
pub fn apply_shift_fft(f: &WaveFunction, t: f64, grid: &MomentumGrid) -> Result<WaveFunction> {
    check_time(t)?;
    let n = grid.n_points();
    let size = f.window().size();
    if n < size {
        return Err(Error::GridTooSmall {
            grid: n,
            support: size,
        });
    }
    let lo = f.window().lo() - ((n - size) / 2) as i64;
    let out_window = Window::new(lo, lo + n as i64 - 1)?;

    // a_p = (-1)^p e^{iπp/N} f_{lo+p}; the phase e^{iκ_m lo} cancels
    // between the two transforms.
    let half_step = PI / n as f64;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|p| {
            let j = out_window.site(p);
            f.amplitude(j) * alternating(p) * Complex64::from_polar(1.0, half_step * p as f64)
        })
        .collect();

    let mut planner = FftPlanner::<f64>::new();
    // e^{ipκ_m} = e^{ip(-π + π/N)} e^{2πipm/N}: an inverse (positive
    // exponent) transform.
    planner.plan_fft_inverse(n).process(&mut buf);
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, t * grid.cell_midpoint(m));
    }
    planner.plan_fft_forward(n).process(&mut buf);

    let scale = 1.0 / n as f64;
    let amplitudes = buf
        .into_iter()
        .enumerate()
        .map(|(p, v)| {
            v * (scale * alternating(p)) * Complex64::from_polar(1.0, -half_step * p as f64)
        })
        .collect();
    WaveFunction::new(out_window, amplitudes)
}

fn alternating(p: usize) -> f64 {
    if p.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}
