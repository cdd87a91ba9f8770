//! Gauge-invariant quasi-free states of the flow.
//!
//! The equilibrium state at inverse temperature `β` has momentum occupation
//! `ρ_β(k) = 1 / (1 + e^{βk})` on `[-π, π]`. At `β = +∞` this is the Fermi
//! sea of left movers (`k < 0` filled, the ground state); at `β = -∞` the
//! right movers are filled (the ceiling state).
//!
//! Two-point convention: `Γ[j, l] = φ(c_l* c_j) = (1/2π) ∫ ρ(k) e^{i(l-j)k} dk`.
//! It is the one for which a finite-volume Gibbs state of
//! `H_W = Σ h[j,m] c_j* c_m` has `Γ = (1 + e^{β h_W})^{-1}`; the Fock-space
//! oracle checks exactly that identity.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::HermitianEigen;
use crate::one_particle::{build_shift_kernel, KernelMatrix, WaveFunction, Window};
use crate::quadrature::integrate_with_breaks;

/// Absolute tolerance of every momentum integral in this module.
pub const QUADRATURE_TOL: f64 = 1e-10;

const BREAKS: [f64; 3] = [-PI, 0.0, PI];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiFreeState {
    beta: f64,
}

impl QuasiFreeState {
    /// Equilibrium state at inverse temperature `beta`; `±∞` are allowed.
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_nan() {
            return Err(Error::InvalidArgument("inverse temperature is NaN".into()));
        }
        Ok(Self { beta })
    }

    pub fn ground() -> Self {
        Self {
            beta: f64::INFINITY,
        }
    }

    pub fn ceiling() -> Self {
        Self {
            beta: f64::NEG_INFINITY,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ρ_β(k)`. At `β = ±∞` the value at `k = 0` is taken as `1/2`.
    pub fn occupation(&self, k: f64) -> f64 {
        if self.beta.is_infinite() {
            let filled = if self.beta > 0.0 { k < 0.0 } else { k > 0.0 };
            return if k == 0.0 {
                0.5
            } else if filled {
                1.0
            } else {
                0.0
            };
        }
        crate::one_particle::fermi(self.beta, k)
    }
}

/// `φ(c_l* c_j)`.
pub fn two_point(state: &QuasiFreeState, j: i64, l: i64) -> Result<Complex64> {
    let d = (l - j) as f64;
    let q = integrate_with_breaks(
        |k| Complex64::from_polar(state.occupation(k), d * k),
        &BREAKS,
        QUADRATURE_TOL,
    )?;
    Ok(q.value / (2.0 * PI))
}

/// `φ(c_j c_l*) = δ_{jl} - φ(c_l* c_j)`.
pub fn two_point_hole(state: &QuasiFreeState, j: i64, l: i64) -> Result<Complex64> {
    let delta = if j == l { 1.0 } else { 0.0 };
    Ok(Complex64::new(delta, 0.0) - two_point(state, j, l)?)
}

/// `Γ[j, l] = φ(c_l* c_j)` on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    window: Window,
    entries: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    pub fn new(window: Window, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != window.size() || entries.ncols() != window.size() {
            return Err(Error::DimensionMismatch {
                left: window.size(),
                right: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(Self { window, entries })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, j: i64, l: i64) -> Complex64 {
        match (self.window.offset(j), self.window.offset(l)) {
            (Some(r), Some(c)) => self.entries[(r, c)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Spectrum, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(HermitianEigen::new(&self.entries)?.eigenvalues().to_vec())
    }

    /// `1 - Γ`, the matrix of `φ(c_j c_l*)`.
    pub fn complement(&self) -> CorrelationMatrix {
        let n = self.window.size();
        CorrelationMatrix {
            window: self.window,
            entries: DMatrix::identity(n, n) - &self.entries,
        }
    }

    /// Restriction to a sub-window.
    pub fn block(&self, window: Window) -> Result<CorrelationMatrix> {
        if !self.window.contains_window(&window) {
            return Err(Error::WindowMismatch {
                expected: self.window,
                found: window,
            });
        }
        let entries = DMatrix::from_fn(window.size(), window.size(), |r, c| {
            self.entry(window.site(r), window.site(c))
        });
        Ok(CorrelationMatrix { window, entries })
    }

    /// Largest `|Γ[j,l] - Γ[j+1,l+1]|`; zero for a Toeplitz matrix.
    pub fn toeplitz_residual(&self) -> f64 {
        let n = self.window.size();
        let mut worst: f64 = 0.0;
        for r in 1..n {
            for c in 1..n {
                worst = worst.max((self.entries[(r, c)] - self.entries[(r - 1, c - 1)]).norm());
            }
        }
        worst
    }

    /// Largest entrywise distance to another matrix on the same window.
    pub fn max_abs_diff(&self, other: &CorrelationMatrix) -> Result<f64> {
        if self.window != other.window {
            return Err(Error::WindowMismatch {
                expected: self.window,
                found: other.window,
            });
        }
        Ok(crate::linalg::max_abs(&(&self.entries - &other.entries)))
    }
}

impl From<KernelMatrix> for CorrelationMatrix {
    fn from(k: KernelMatrix) -> Self {
        let window = k.row_window();
        CorrelationMatrix {
            window,
            entries: k.into_entries(),
        }
    }
}

/// Toeplitz matrix of [`two_point`] values.
pub fn correlation_matrix(state: &QuasiFreeState, window: Window) -> Result<CorrelationMatrix> {
    let n = window.size() as i64;
    // Γ[j, l] depends on l - j only
    let diagonals = (-(n - 1)..n)
        .map(|d| two_point(state, 0, d))
        .collect::<Result<Vec<_>>>()?;
    let entries = DMatrix::from_fn(n as usize, n as usize, |r, c| {
        diagonals[(c as i64 - r as i64 + n - 1) as usize]
    });
    Ok(CorrelationMatrix { window, entries })
}

/// `U_t Γ U_t†` on the window of `gamma` padded by `pad`.
pub fn evolve_correlation_matrix(
    gamma: &CorrelationMatrix,
    t: f64,
    pad: u64,
) -> Result<CorrelationMatrix> {
    let k = build_shift_kernel(t, gamma.window, pad)?;
    let kg = crate::linalg::matmul(k.entries(), &gamma.entries)?;
    let entries = crate::linalg::matmul(&kg, &k.entries().adjoint())?;
    Ok(CorrelationMatrix {
        window: k.row_window(),
        entries,
    })
}

/// The two sides of the KMS boundary condition for `A = c(f)`,
/// `B = c*(g)`:
///
/// ```text
/// F(t + iβ) = φ(c(f) τ_{t+iβ}(c*(g))) = (1/2π) ∫ (1 - ρ(k)) e^{itk} e^{-βk} w(k) dk
/// G(t)      = φ(τ_t(c*(g)) c(f))      = (1/2π) ∫ ρ(k) e^{itk} w(k) dk
/// ```
///
/// with `w(k) = f̃(-k) g̃(k)`. Both integrals are evaluated independently.
pub fn kms_sides(
    state: &QuasiFreeState,
    f: &WaveFunction,
    g: &WaveFunction,
    t: f64,
) -> Result<(Complex64, Complex64)> {
    let beta = state.beta();
    if !beta.is_finite() {
        return Err(Error::InfiniteBeta);
    }
    crate::error::check_time(t)?;
    let transform = |v: &WaveFunction, k: f64| -> Complex64 {
        v.window()
            .sites()
            .zip(v.amplitudes())
            .map(|(j, a)| a * Complex64::from_polar(1.0, j as f64 * k))
            .sum()
    };
    let weight = |k: f64| transform(f, -k) * transform(g, k);
    let lhs = integrate_with_breaks(
        |k| {
            weight(k)
                * Complex64::from_polar((1.0 - state.occupation(k)) * (-beta * k).exp(), t * k)
        },
        &BREAKS,
        QUADRATURE_TOL,
    )?;
    let rhs = integrate_with_breaks(
        |k| weight(k) * Complex64::from_polar(state.occupation(k), t * k),
        &BREAKS,
        QUADRATURE_TOL,
    )?;
    Ok((lhs.value / (2.0 * PI), rhs.value / (2.0 * PI)))
}

/// `|F(t + iβ) - G(t)|`, see [`kms_sides`].
pub fn kms_residual(
    state: &QuasiFreeState,
    f: &WaveFunction,
    g: &WaveFunction,
    t: f64,
) -> Result<f64> {
    let (lhs, rhs) = kms_sides(state, f, g, t)?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ground_state_two_point() {
        let s = QuasiFreeState::ground();
        assert!((two_point(&s, 3, 3).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        let v = two_point(&s, 1, 0).unwrap();
        assert!((v - c(0.0, 1.0 / PI)).norm() < 1e-12);
        // ceiling state is the mirror image
        let w = two_point(&QuasiFreeState::ceiling(), 1, 0).unwrap();
        assert!((w + v).norm() < 1e-12);
    }

    #[test]
    fn infinite_temperature_is_half_identity() {
        let s = QuasiFreeState::new(0.0).unwrap();
        assert!((two_point(&s, 0, 0).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        assert!(two_point(&s, 0, 4).unwrap().norm() < 1e-12);
        let g = correlation_matrix(&s, Window::new(0, 5).unwrap()).unwrap();
        let half = DMatrix::identity(6, 6) * c(0.5, 0.0);
        assert!(crate::linalg::max_abs(&(g.entries() - half)) < 1e-12);
    }

    #[test]
    fn hole_two_point_is_complement() {
        let s = QuasiFreeState::new(1.3).unwrap();
        let a = two_point(&s, 2, 2).unwrap() + two_point_hole(&s, 2, 2).unwrap();
        assert!((a - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn correlation_matrix_properties() {
        let w = Window::new(-4, 5).unwrap();
        for beta in [f64::NEG_INFINITY, -2.0, 0.5, 1.0, 7.0, f64::INFINITY] {
            let s = QuasiFreeState::new(beta).unwrap();
            let g = correlation_matrix(&s, w).unwrap();
            assert_eq!(g.toeplitz_residual(), 0.0);
            assert!(crate::linalg::hermiticity_residual(g.entries()) < 1e-12);
            for spectrum in [
                g.eigenvalues().unwrap(),
                g.complement().eigenvalues().unwrap(),
            ] {
                assert!(spectrum
                    .iter()
                    .all(|&x| (-1e-10..=1.0 + 1e-10).contains(&x)));
            }
        }
    }

    #[test]
    fn particle_hole_and_duality() {
        let w = Window::new(0, 6).unwrap();
        for beta in [0.3, 2.0] {
            let p = correlation_matrix(&QuasiFreeState::new(beta).unwrap(), w).unwrap();
            let m = correlation_matrix(&QuasiFreeState::new(-beta).unwrap(), w).unwrap();
            for j in w.sites() {
                assert!((p.entry(j, j) + m.entry(j, j) - c(1.0, 0.0)).norm() < 1e-10);
            }
        }
        let up = correlation_matrix(&QuasiFreeState::ground(), w).unwrap();
        let down = correlation_matrix(&QuasiFreeState::ceiling(), w).unwrap();
        let sum = up.entries() + down.entries();
        assert!(crate::linalg::max_abs(&(sum - DMatrix::identity(7, 7))) < 1e-10);
    }

    #[test]
    fn integer_evolution_translates() {
        let s = QuasiFreeState::new(0.8).unwrap();
        let g = correlation_matrix(&s, Window::new(0, 7).unwrap()).unwrap();
        let e = evolve_correlation_matrix(&g, 2.0, 3).unwrap();
        for j in 0..8 {
            for l in 0..8 {
                assert_eq!(e.entry(j + 2, l + 2), g.entry(j, l));
            }
        }
        let same = evolve_correlation_matrix(&g, 0.0, 0).unwrap();
        assert_eq!(same, g);
    }

    #[test]
    fn equilibrium_states_are_stationary() {
        let s = QuasiFreeState::new(1.0).unwrap();
        let inner = Window::centered(3);
        let mut errors = Vec::new();
        for radius in [40u64, 160] {
            let g = correlation_matrix(&s, Window::centered(radius)).unwrap();
            let e = evolve_correlation_matrix(&g, 0.5, 0).unwrap();
            let err = e
                .block(inner)
                .unwrap()
                .max_abs_diff(&g.block(inner).unwrap())
                .unwrap();
            errors.push(err);
        }
        assert!(errors[1] < errors[0], "{errors:?}");
        assert!(errors[1] < 5e-3, "{errors:?}");
    }

    #[test]
    fn kms_condition_holds() {
        let s = QuasiFreeState::new(1.0).unwrap();
        let chi = WaveFunction::basis(0);
        assert!(kms_residual(&s, &chi, &chi, 0.0).unwrap() <= 1e-8);
        let f = WaveFunction::new(
            Window::new(-1, 1).unwrap(),
            vec![c(0.3, -0.2), c(1.0, 0.5), c(-0.7, 0.1)],
        )
        .unwrap();
        let g =
            WaveFunction::new(Window::new(2, 3).unwrap(), vec![c(0.1, 0.9), c(-0.4, 0.0)]).unwrap();
        for t in [-1.0, 0.4, 2.5] {
            assert!(kms_residual(&s, &f, &g, t).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn kms_sides_match_two_point() {
        // G(0) with f = χ_j, g = χ_l is φ(c_l* c_j); F(0) is φ(c_j c_l*)
        let s = QuasiFreeState::new(0.7).unwrap();
        let (f_side, g_side) = kms_sides(
            &QuasiFreeState::new(0.0).unwrap(),
            &WaveFunction::basis(1),
            &WaveFunction::basis(4),
            0.0,
        )
        .unwrap();
        assert!((f_side - g_side).norm() < 1e-12);
        let (_, g_side) =
            kms_sides(&s, &WaveFunction::basis(1), &WaveFunction::basis(4), 0.0).unwrap();
        assert!((g_side - two_point(&s, 1, 4).unwrap()).norm() < 1e-11);
    }

    #[test]
    fn kms_rejects_infinite_beta() {
        let chi = WaveFunction::basis(0);
        assert_eq!(
            kms_residual(&QuasiFreeState::ground(), &chi, &chi, 0.0),
            Err(Error::InfiniteBeta)
        );
    }
}
