//! One-particle picture of the continuous shift flow.
//!
//! The lattice Hilbert space `l²(Z)` is identified with `L²[-π, π]` through
//! `f̃(k) = Σ_j f_j e^{ijk}`. In momentum space the flow is the multiplier
//! `e^{itk}`; in position space it is the sinc kernel
//! `(U_t)_{l j} = sinc(π(j + t - l))`, which collapses to the ordinary shift
//! `χ_j ↦ χ_{j+t}` when `t` is an integer.
//!
//! Everything here works on finite [`Window`]s of the lattice. Operations that
//! reach outside their input window take an explicit `pad` and state the
//! output window they produce.

mod fft;
mod generator;
mod kernel;

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use fft::{apply_shift_fft, MomentumGrid};
pub(crate) use generator::fermi;
pub use generator::{
    expm_generator, generator_kernel, matrix_element_u, GeneratorFlow, DEFAULT_DENSE_LIMIT,
};
pub use kernel::{
    apply_shift_convolved, apply_shift_exact, build_shift_kernel, sin_pi, sinc_shift_coeff,
    sinc_tail_bound, DEFAULT_PAD,
};

/// Closed interval `[lo, hi]` of lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The single-site window `[site, site]`.
    pub fn single(site: i64) -> Self {
        Self { lo: site, hi: site }
    }

    /// `[-radius, radius]`.
    pub fn centered(radius: u64) -> Self {
        let r = radius as i64;
        Self { lo: -r, hi: r }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn size(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn contains(&self, site: i64) -> bool {
        self.lo <= site && site <= self.hi
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Storage offset of `site`, or `None` outside the window.
    pub fn offset(&self, site: i64) -> Option<usize> {
        self.contains(site).then(|| (site - self.lo) as usize)
    }

    pub fn site(&self, offset: usize) -> i64 {
        self.lo + offset as i64
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    /// `[lo - pad, hi + pad]`.
    pub fn padded(&self, pad: u64) -> Self {
        let p = pad as i64;
        Self {
            lo: self.lo - p,
            hi: self.hi + p,
        }
    }

    /// `[lo + x, hi + x]`.
    pub fn translated(&self, x: i64) -> Self {
        Self {
            lo: self.lo + x,
            hi: self.hi + x,
        }
    }

    /// Smallest window containing both.
    pub fn hull(&self, other: &Window) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Window) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Self { lo, hi })
    }

    /// Midpoint of the window (half-integer for even sizes).
    pub fn center(&self) -> f64 {
        0.5 * (self.lo as f64 + self.hi as f64)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A finitely supported one-particle vector. Amplitudes outside the window
/// are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    window: Window,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(window: Window, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != window.size() {
            return Err(Error::DimensionMismatch {
                left: window.size(),
                right: amplitudes.len(),
            });
        }
        Ok(Self { window, amplitudes })
    }

    pub fn zeros(window: Window) -> Self {
        Self {
            window,
            amplitudes: vec![Complex64::new(0.0, 0.0); window.size()],
        }
    }

    /// The lattice basis vector `χ_site` on the window `[site, site]`.
    pub fn basis(site: i64) -> Self {
        Self {
            window: Window::single(site),
            amplitudes: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// `χ_site` embedded in a larger window.
    pub fn basis_in(window: Window, site: i64) -> Result<Self> {
        let off = window
            .offset(site)
            .ok_or(Error::SiteOutsideWindow { site, window })?;
        let mut f = Self::zeros(window);
        f.amplitudes[off] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn from_fn(window: Window, mut amp: impl FnMut(i64) -> Complex64) -> Self {
        Self {
            window,
            amplitudes: window.sites().map(&mut amp).collect(),
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude at any lattice site (zero outside the window).
    pub fn amplitude(&self, site: i64) -> Complex64 {
        self.window
            .offset(site)
            .map_or(Complex64::new(0.0, 0.0), |o| self.amplitudes[o])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Smallest and largest sites carrying a nonzero amplitude.
    pub fn support(&self) -> Option<Window> {
        let first = self
            .amplitudes
            .iter()
            .position(|a| *a != Complex64::new(0.0, 0.0))?;
        let last = self
            .amplitudes
            .iter()
            .rposition(|a| *a != Complex64::new(0.0, 0.0))?;
        Some(Window {
            lo: self.window.site(first),
            hi: self.window.site(last),
        })
    }

    /// Same vector on another window; amplitudes falling outside are dropped.
    pub fn resized(&self, window: Window) -> Self {
        Self::from_fn(window, |j| self.amplitude(j))
    }

    /// `‖self - other‖` over the union of both windows.
    pub fn distance(&self, other: &WaveFunction) -> f64 {
        self.window
            .hull(&other.window)
            .sites()
            .map(|j| (self.amplitude(j) - other.amplitude(j)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ_j a_j b_j` without conjugation.
    pub fn bilinear(&self, other: &WaveFunction) -> Complex64 {
        match self.window.intersect(&other.window) {
            Some(w) => w
                .sites()
                .map(|j| self.amplitude(j) * other.amplitude(j))
                .sum(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `Σ_j conj(a_j) b_j`.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        match self.window.intersect(&other.window) {
            Some(w) => w
                .sites()
                .map(|j| self.amplitude(j).conj() * other.amplitude(j))
                .sum(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            window: self.window,
            amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(),
        }
    }
}

/// Dense matrix from one window to another. Rows are indexed by output
/// sites, columns by input sites.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    row_window: Window,
    col_window: Window,
    entries: DMatrix<Complex64>,
}

impl KernelMatrix {
    pub fn new(
        row_window: Window,
        col_window: Window,
        entries: DMatrix<Complex64>,
    ) -> Result<Self> {
        if entries.nrows() != row_window.size() {
            return Err(Error::DimensionMismatch {
                left: row_window.size(),
                right: entries.nrows(),
            });
        }
        if entries.ncols() != col_window.size() {
            return Err(Error::DimensionMismatch {
                left: col_window.size(),
                right: entries.ncols(),
            });
        }
        Ok(Self {
            row_window,
            col_window,
            entries,
        })
    }

    pub fn from_fn(
        row_window: Window,
        col_window: Window,
        mut entry: impl FnMut(i64, i64) -> Complex64,
    ) -> Self {
        let entries = DMatrix::from_fn(row_window.size(), col_window.size(), |r, c| {
            entry(row_window.site(r), col_window.site(c))
        });
        Self {
            row_window,
            col_window,
            entries,
        }
    }

    pub fn identity(window: Window) -> Self {
        Self {
            row_window: window,
            col_window: window,
            entries: DMatrix::identity(window.size(), window.size()),
        }
    }

    pub fn row_window(&self) -> Window {
        self.row_window
    }

    pub fn col_window(&self) -> Window {
        self.col_window
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// Entry for output site `row` and input site `col`; zero outside.
    pub fn entry(&self, row: i64, col: i64) -> Complex64 {
        match (self.row_window.offset(row), self.col_window.offset(col)) {
            (Some(r), Some(c)) => self.entries[(r, c)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Image of `χ_site` as a vector on the row window.
    pub fn column(&self, site: i64) -> Result<WaveFunction> {
        let c = self
            .col_window
            .offset(site)
            .ok_or(Error::SiteOutsideWindow {
                site,
                window: self.col_window,
            })?;
        Ok(WaveFunction {
            window: self.row_window,
            amplitudes: self.entries.column(c).iter().copied().collect(),
        })
    }

    /// Applies the matrix to `f`, whose window must lie in the column window.
    pub fn apply(&self, f: &WaveFunction) -> Result<WaveFunction> {
        if !self.col_window.contains_window(&f.window) {
            return Err(Error::WindowMismatch {
                expected: self.col_window,
                found: f.window,
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.row_window.size()];
        for (j, a) in f.window.sites().zip(&f.amplitudes) {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let c = (j - self.col_window.lo) as usize;
            for (o, k) in out.iter_mut().zip(self.entries.column(c).iter()) {
                *o += k * a;
            }
        }
        Ok(WaveFunction {
            window: self.row_window,
            amplitudes: out,
        })
    }

    /// `self · rhs`; requires `self.col_window == rhs.row_window`.
    pub fn compose(&self, rhs: &KernelMatrix) -> Result<KernelMatrix> {
        if self.col_window != rhs.row_window {
            return Err(Error::WindowMismatch {
                expected: self.col_window,
                found: rhs.row_window,
            });
        }
        Ok(KernelMatrix {
            row_window: self.row_window,
            col_window: rhs.col_window,
            entries: &self.entries * &rhs.entries,
        })
    }

    pub fn adjoint(&self) -> KernelMatrix {
        KernelMatrix {
            row_window: self.col_window,
            col_window: self.row_window,
            entries: self.entries.adjoint(),
        }
    }

    /// Square block on `window`, which must lie inside both windows.
    pub fn block(&self, window: Window) -> Result<KernelMatrix> {
        for w in [self.row_window, self.col_window] {
            if !w.contains_window(&window) {
                return Err(Error::WindowMismatch {
                    expected: w,
                    found: window,
                });
            }
        }
        Ok(KernelMatrix::from_fn(window, window, |r, c| {
            self.entry(r, c)
        }))
    }

    /// Largest entrywise modulus of `self - other` (same windows required).
    pub fn max_abs_diff(&self, other: &KernelMatrix) -> Result<f64> {
        if self.row_window != other.row_window || self.col_window != other.col_window {
            return Err(Error::WindowMismatch {
                expected: self.row_window,
                found: other.row_window,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
