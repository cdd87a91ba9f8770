//! Brute-force fermionic Fock space on a handful of sites.
//!
//! Everything is a dense `2^n × 2^n` matrix. Basis state `s` is a bit string;
//! bit `p` is the occupation of site `window.lo() + p`. The Jordan–Wigner
//! string of `c_j` is the product of `σ_q^z = 2 c_q* c_q - 1` over the sites
//! `q < j` of the window, so that `S^{(j)} c_j` is the bare single-site
//! lowering operator and the spin operators are strictly local.
//!
//! The crossed-product element `T` is represented by `1`. That is consistent
//! only where the grading twist `Θ_-` acts trivially, i.e. on windows inside
//! `[1, ∞)`, so the spin constructors reject anything else.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_time, Error, Result};
use crate::linalg::{self, HermitianEigen};
use crate::one_particle::{generator_kernel, GeneratorFlow, WaveFunction, Window};
use crate::quasifree_states::CorrelationMatrix;

/// Default largest number of sites (`2^12 = 4096` states).
pub const DEFAULT_SITE_CAP: usize = 12;

/// Tolerance at which the dense Gibbs trace and the one-particle Fermi
/// function must agree.
pub const GIBBS_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        };
        f.write_str(s)
    }
}

/// Operator on the Fock space of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    window: Window,
    entries: DMatrix<Complex64>,
}

impl FockMatrix {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn n_sites(&self) -> usize {
        self.window.size()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    fn same_space(&self, other: &FockMatrix) -> Result<()> {
        if self.window != other.window {
            return Err(Error::WindowMismatch {
                expected: self.window,
                found: other.window,
            });
        }
        Ok(())
    }

    fn with(&self, entries: DMatrix<Complex64>) -> FockMatrix {
        FockMatrix {
            window: self.window,
            entries,
        }
    }

    pub fn adjoint(&self) -> FockMatrix {
        self.with(self.entries.adjoint())
    }

    pub fn scale(&self, z: Complex64) -> FockMatrix {
        self.with(&self.entries * z)
    }

    pub fn add(&self, other: &FockMatrix) -> Result<FockMatrix> {
        self.same_space(other)?;
        Ok(self.with(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &FockMatrix) -> Result<FockMatrix> {
        self.same_space(other)?;
        Ok(self.with(&self.entries - &other.entries))
    }

    /// `self · other`. Products involving a sparse factor (field operators,
    /// Pauli strings) skip the zero entries; dense-dense products go to the
    /// blocked kernel in [`linalg::matmul`].
    pub fn mul(&self, other: &FockMatrix) -> Result<FockMatrix> {
        self.same_space(other)?;
        let n = self.dim();
        let sparse_limit = n * n / 8;
        let dense =
            |m: &DMatrix<Complex64>| m.iter().filter(|z| **z != ZERO).nth(sparse_limit).is_some();
        if dense(&self.entries) && dense(&other.entries) {
            return Ok(self.with(linalg::matmul(&self.entries, &other.entries)?));
        }
        let columns: Vec<Vec<(usize, Complex64)>> = self
            .entries
            .as_slice()
            .chunks_exact(n)
            .map(|c| {
                c.iter()
                    .enumerate()
                    .filter(|(_, z)| **z != ZERO)
                    .map(|(i, z)| (i, *z))
                    .collect()
            })
            .collect();
        let mut out = vec![ZERO; n * n];
        for (rhs, dst) in other
            .entries
            .as_slice()
            .chunks_exact(n)
            .zip(out.chunks_exact_mut(n))
        {
            for (k, b) in rhs.iter().enumerate() {
                if *b == ZERO {
                    continue;
                }
                for &(i, a) in &columns[k] {
                    dst[i] += a * b;
                }
            }
        }
        Ok(self.with(DMatrix::from_vec(n, n, out)))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &FockMatrix) -> Result<FockMatrix> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &FockMatrix) -> Result<FockMatrix> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// Operator norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        linalg::operator_norm(&self.entries)
    }

    /// Cheap upper bound on [`Self::op_norm`].
    pub fn op_norm_bound(&self) -> f64 {
        linalg::operator_norm_bound(&self.entries)
    }

    /// `‖A - A†‖` entrywise maximum.
    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermiticity_residual(&self.entries)
    }

    /// `Θ(A) = P A P` with the parity `P = Π_j (-1)^{n_j}`.
    pub fn graded(&self) -> FockMatrix {
        let mut out = self.entries.clone();
        for ((r, c), z) in out
            .iter_mut()
            .enumerate()
            .map(|(k, z)| ((k % self.dim(), k / self.dim()), z))
        {
            if (r.count_ones() + c.count_ones()) % 2 == 1 {
                *z = -*z;
            }
        }
        self.with(out)
    }

    /// Largest entry of `A - Θ(A)`; zero for even operators.
    pub fn odd_part_residual(&self) -> f64 {
        linalg::max_abs(&(&self.entries - self.graded().entries)) / 2.0
    }

    /// Relabels every site `q` to `q + 1` inside the same window. The
    /// operator must act trivially on the last site; the image acts trivially
    /// on the first.
    pub fn advance_sites(&self) -> Result<FockMatrix> {
        let n = self.n_sites();
        let half = 1usize << (n - 1);
        let top = half;
        // trivial on the last site: block-diagonal with equal blocks
        let mut residual: f64 = 0.0;
        for s in 0..half {
            for t in 0..half {
                residual = residual
                    .max((self.entries[(s | top, t | top)] - self.entries[(s, t)]).norm())
                    .max(self.entries[(s | top, t)].norm())
                    .max(self.entries[(s, t | top)].norm());
            }
        }
        if residual > 0.0 {
            return Err(Error::InvalidArgument(format!(
                "operator acts on the last site of {} (residual {residual:e})",
                self.window
            )));
        }
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for s in 0..half {
            for t in 0..half {
                let v = self.entries[(s, t)];
                if v == ZERO {
                    continue;
                }
                for b in 0..2 {
                    out[((s << 1) | b, (t << 1) | b)] = v;
                }
            }
        }
        Ok(self.with(out))
    }
}

/// Fock space of a window, with a cap on the number of sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    window: Window,
}

impl FockSpace {
    pub fn new(window: Window) -> Result<Self> {
        Self::with_cap(window, DEFAULT_SITE_CAP)
    }

    pub fn with_cap(window: Window, cap: usize) -> Result<Self> {
        if window.size() > cap {
            return Err(Error::SiteCapExceeded {
                requested: window.size(),
                cap,
            });
        }
        Ok(Self { window })
    }

    /// Sites `1..=n_sites`.
    pub fn sites(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidArgument(
                "Fock space needs at least one site".into(),
            ));
        }
        Self::new(Window::new(1, n_sites as i64)?)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self) -> usize {
        1 << self.window.size()
    }

    fn wrap(&self, entries: DMatrix<Complex64>) -> FockMatrix {
        FockMatrix {
            window: self.window,
            entries,
        }
    }

    fn bit(&self, site: i64) -> Result<usize> {
        self.window.offset(site).ok_or(Error::SiteOutsideWindow {
            site,
            window: self.window,
        })
    }

    pub fn identity(&self) -> FockMatrix {
        self.wrap(DMatrix::identity(self.dim(), self.dim()))
    }

    pub fn zero(&self) -> FockMatrix {
        self.wrap(DMatrix::zeros(self.dim(), self.dim()))
    }

    /// Parity `Π_j (-1)^{n_j}`, the grading unitary.
    pub fn parity(&self) -> FockMatrix {
        let d = self.dim();
        self.wrap(DMatrix::from_fn(d, d, |r, c| {
            if r != c {
                ZERO
            } else if r.count_ones() % 2 == 0 {
                ONE
            } else {
                -ONE
            }
        }))
    }

    /// `c_site`.
    pub fn annihilator(&self, site: i64) -> Result<FockMatrix> {
        let p = self.bit(site)?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for s in 0..d {
            if let Some((sign, s2)) = annihilate(p, s) {
                m[(s2, s)] = Complex64::new(sign, 0.0);
            }
        }
        Ok(self.wrap(m))
    }

    /// `c_site*`.
    pub fn creator(&self, site: i64) -> Result<FockMatrix> {
        Ok(self.annihilator(site)?.adjoint())
    }

    /// `n_site = c_site* c_site`.
    pub fn number(&self, site: i64) -> Result<FockMatrix> {
        let p = self.bit(site)?;
        let d = self.dim();
        Ok(self.wrap(DMatrix::from_fn(d, d, |r, c| {
            if r == c && (r >> p) & 1 == 1 {
                ONE
            } else {
                ZERO
            }
        })))
    }

    /// `c(f) = Σ_j f_j c_j`; `f` must live inside the window.
    pub fn field(&self, f: &WaveFunction) -> Result<FockMatrix> {
        self.check_support(f)?;
        let mut out = self.zero();
        for (j, a) in f.window().sites().zip(f.amplitudes()) {
            if *a != ZERO {
                out = out.add(&self.annihilator(j)?.scale(*a))?;
            }
        }
        Ok(out)
    }

    /// `c*(f) = Σ_j f_j c_j*`.
    pub fn cofield(&self, f: &WaveFunction) -> Result<FockMatrix> {
        self.check_support(f)?;
        let mut out = self.zero();
        for (j, a) in f.window().sites().zip(f.amplitudes()) {
            if *a != ZERO {
                out = out.add(&self.creator(j)?.scale(*a))?;
            }
        }
        Ok(out)
    }

    fn check_support(&self, f: &WaveFunction) -> Result<()> {
        if let Some(support) = f.support() {
            if !self.window.contains_window(&support) {
                return Err(Error::WindowMismatch {
                    expected: self.window,
                    found: support,
                });
            }
        }
        Ok(())
    }

    /// `σ_site^axis` with `σ^z = 2n - 1`. The string `Π_{q<site} σ^z_q`
    /// cancels the fermionic sign, so `σ^x` and `σ^y` act on a single bit.
    pub fn pauli(&self, site: i64, axis: PauliAxis) -> Result<FockMatrix> {
        if self.window.lo() <= 0 {
            return Err(Error::NonPositiveSites(self.window));
        }
        let p = self.bit(site)?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for s in 0..d {
            let occupied = (s >> p) & 1 == 1;
            match axis {
                PauliAxis::X => m[(s ^ (1 << p), s)] = ONE,
                PauliAxis::Y => {
                    m[(s ^ (1 << p), s)] = Complex64::new(0.0, if occupied { 1.0 } else { -1.0 })
                }
                PauliAxis::Z => m[(s, s)] = if occupied { ONE } else { -ONE },
            }
        }
        Ok(self.wrap(m))
    }

    /// `H_W = Σ_{j,m ∈ W} h[j,m] c_j* c_m` with the normalized one-particle
    /// generator `h`.
    pub fn truncated_hamiltonian(&self) -> FockMatrix {
        self.second_quantize(generator_kernel(self.window).entries())
    }

    /// `Σ_{j,m} k[j,m] c_j* c_m` for a one-particle matrix on the window.
    pub fn second_quantize(&self, kernel: &DMatrix<Complex64>) -> FockMatrix {
        let n = self.window.size();
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for s in 0..d {
            for q in 0..n {
                let Some((s1, mid)) = annihilate(q, s) else {
                    continue;
                };
                for p in 0..n {
                    let k = kernel[(p, q)];
                    if k == ZERO {
                        continue;
                    }
                    if let Some((s2, out)) = create(p, mid) {
                        m[(out, s)] += k * (s1 * s2);
                    }
                }
            }
        }
        self.wrap(m)
    }
}

/// `(sign, s')` with `c_p |s⟩ = sign |s'⟩`, or `None` if site `p` is empty.
fn annihilate(p: usize, s: usize) -> Option<(f64, usize)> {
    if (s >> p) & 1 == 0 {
        return None;
    }
    Some((string_sign(p, s), s & !(1 << p)))
}

/// `(sign, s')` with `c_p* |s⟩ = sign |s'⟩`, or `None` if site `p` is full.
fn create(p: usize, s: usize) -> Option<(f64, usize)> {
    if (s >> p) & 1 == 1 {
        return None;
    }
    Some((string_sign(p, s), s | (1 << p)))
}

/// Eigenvalue of `Π_{q<p} σ_q^z` on `|s⟩`: `(-1)^{#empty sites below p}`.
fn string_sign(p: usize, s: usize) -> f64 {
    let below = s & ((1 << p) - 1);
    let empty = p as u32 - below.count_ones();
    if empty.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Caches the eigendecomposition of a Hamiltonian for repeated evolution.
#[derive(Debug, Clone)]
pub struct HeisenbergEvolver {
    window: Window,
    eigen: HermitianEigen,
}

impl HeisenbergEvolver {
    pub fn new(hamiltonian: &FockMatrix) -> Result<Self> {
        Ok(Self {
            window: hamiltonian.window,
            eigen: HermitianEigen::new(&hamiltonian.entries)?,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigen.eigenvalues()
    }

    /// `e^{itH} A e^{-itH}`.
    pub fn evolve(&self, a: &FockMatrix, t: f64) -> Result<FockMatrix> {
        check_time(t)?;
        if a.window != self.window {
            return Err(Error::DimensionMismatch {
                left: 1 << self.window.size(),
                right: a.dim(),
            });
        }
        if t == 0.0 {
            return Ok(a.clone());
        }
        let v = self.eigen.eigenvectors();
        let lambda = self.eigen.eigenvalues();
        let mut rotated = linalg::matmul(&linalg::matmul(&v.adjoint(), &a.entries)?, v)?;
        for ((r, c), z) in rotated
            .iter_mut()
            .enumerate()
            .map(|(k, z)| ((k % lambda.len(), k / lambda.len()), z))
        {
            *z *= Complex64::from_polar(1.0, t * (lambda[r] - lambda[c]));
        }
        let back = linalg::matmul(&linalg::matmul(v, &rotated)?, &v.adjoint())?;
        Ok(a.with(back))
    }
}

/// `e^{itH} A e^{-itH}` for a single time.
pub fn heisenberg_evolve(a: &FockMatrix, h: &FockMatrix, t: f64) -> Result<FockMatrix> {
    if a.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: h.dim(),
        });
    }
    HeisenbergEvolver::new(h)?.evolve(a, t)
}

/// Finite-volume check of `e^{itH_W} c(f) e^{-itH_W} = c(e^{ith_W} f)`.
/// Returns the operator-norm residual.
pub fn quasifree_equivalence_check(window: Window, f: &WaveFunction, t: f64) -> Result<f64> {
    let space = FockSpace::new(window)?;
    let h = space.truncated_hamiltonian();
    let evolver = HeisenbergEvolver::new(&h)?;
    let flow = GeneratorFlow::new(window)?;
    equivalence_residual(&space, &evolver, &flow, f, t)
}

/// As [`quasifree_equivalence_check`], reusing precomputed decompositions.
pub fn equivalence_residual(
    space: &FockSpace,
    evolver: &HeisenbergEvolver,
    flow: &GeneratorFlow,
    f: &WaveFunction,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    let window = space.window();
    let f_in = match f.support() {
        Some(s) if !window.contains_window(&s) => {
            return Err(Error::WindowMismatch {
                expected: window,
                found: s,
            })
        }
        _ => f.resized(window),
    };
    let lhs = evolver.evolve(&space.field(&f_in)?, t)?;
    let evolved = flow.propagator(t)?.apply(&f_in)?;
    let rhs = space.field(&evolved)?;
    Ok(lhs.sub(&rhs)?.op_norm())
}

/// Largest violation of `{c_i, c_j*} = δ_ij` and `{c_i, c_j} = 0` over the
/// window, measured with [`FockMatrix::op_norm_bound`].
pub fn car_residual(space: &FockSpace) -> Result<f64> {
    let id = space.identity();
    let c = space
        .window()
        .sites()
        .map(|j| space.annihilator(j))
        .collect::<Result<Vec<_>>>()?;
    let cd: Vec<FockMatrix> = c.iter().map(FockMatrix::adjoint).collect();
    let mut worst: f64 = 0.0;
    for (i, ci) in c.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            let mixed = ci.anticommutator(&cd[j])?;
            let r = if i == j { mixed.sub(&id)? } else { mixed };
            worst = worst.max(r.op_norm_bound());
            if j >= i {
                worst = worst.max(ci.anticommutator(cj)?.op_norm_bound());
            }
        }
    }
    Ok(worst)
}

/// Largest violation of the Pauli algebra on every site, of commutation
/// across sites, and of `c_j = (Π_{q<j} σ^z_q)(σ^x_j - iσ^y_j)/2`.
pub fn jordan_wigner_residual(space: &FockSpace) -> Result<f64> {
    let id = space.identity();
    let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    let sigma = space
        .window()
        .sites()
        .map(|j| {
            axes.iter()
                .map(|&a| space.pauli(j, a))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let i_unit = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    let mut string = id.clone();
    for (k, (j, s)) in space.window().sites().zip(&sigma).enumerate() {
        for a in 0..3 {
            worst = worst.max(s[a].mul(&s[a])?.sub(&id)?.op_norm_bound());
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            worst = worst.max(s[a].mul(&s[b])?.sub(&s[c].scale(i_unit))?.op_norm_bound());
        }
        let lowering = s[0]
            .sub(&s[1].scale(i_unit))?
            .scale(Complex64::new(0.5, 0.0));
        worst = worst.max(
            string
                .mul(&lowering)?
                .sub(&space.annihilator(j)?)?
                .op_norm_bound(),
        );
        string = string.mul(&s[2])?;
        for other in &sigma[k + 1..] {
            for a in s {
                for b in other {
                    worst = worst.max(a.commutator(b)?.op_norm_bound());
                }
            }
        }
    }
    Ok(worst)
}

/// Dense-trace and closed-form finite-volume Gibbs correlation matrices.
#[derive(Debug, Clone)]
pub struct GibbsComparison {
    pub dense: CorrelationMatrix,
    pub closed_form: CorrelationMatrix,
    pub discrepancy: f64,
}

/// Computes `Γ[j,l] = Tr(e^{-βH_W} c_l* c_j) / Tr(e^{-βH_W})` by brute force
/// and `(1 + e^{β h_W})^{-1}` from the one-particle generator.
pub fn gibbs_comparison(window: Window, beta: f64) -> Result<GibbsComparison> {
    if !beta.is_finite() {
        return Err(Error::InfiniteBeta);
    }
    let space = FockSpace::new(window)?;
    let h = space.truncated_hamiltonian();
    let eigen = HermitianEigen::new(h.entries())?;
    let e_min = eigen.eigenvalues().first().copied().unwrap_or(0.0);
    let e_max = eigen.eigenvalues().last().copied().unwrap_or(0.0);
    // shift by the dominant end of the spectrum to keep the weights bounded
    let shift = if beta >= 0.0 { e_min } else { e_max };
    let rho = eigen.map(|e| Complex64::new((-beta * (e - shift)).exp(), 0.0));
    let z: Complex64 = rho.diagonal().iter().sum();

    let n = window.size();
    let dense = DMatrix::from_fn(n, n, |r, c| {
        // Tr(ρ c_l* c_j) with j = row site, l = column site
        let mut acc = ZERO;
        for s in 0..space.dim() {
            let Some((s1, mid)) = annihilate(r, s) else {
                continue;
            };
            if let Some((s2, out)) = create(c, mid) {
                acc += rho[(s, out)] * (s1 * s2);
            }
        }
        acc / z
    });
    let closed = GeneratorFlow::new(window)?.fermi_function(beta);
    let dense = CorrelationMatrix::new(window, dense)?;
    let closed_form = CorrelationMatrix::from(closed);
    let discrepancy = dense.max_abs_diff(&closed_form)?;
    Ok(GibbsComparison {
        dense,
        closed_form,
        discrepancy,
    })
}

/// Finite-volume Gibbs correlation matrix, cross-checked between the two
/// routes of [`gibbs_comparison`] to [`GIBBS_TOLERANCE`].
pub fn gibbs_correlation(window: Window, beta: f64) -> Result<CorrelationMatrix> {
    let cmp = gibbs_comparison(window, beta)?;
    if cmp.discrepancy > GIBBS_TOLERANCE {
        return Err(Error::OracleMismatch {
            what: "Gibbs correlation matrix",
            residual: cmp.discrepancy,
            tolerance: GIBBS_TOLERANCE,
        });
    }
    Ok(cmp.dense)
}

/// `(1 + e^{β h_W})^{-1}` only; cheap enough for windows far beyond the
/// Fock-space cap.
pub fn finite_volume_fermi_matrix(window: Window, beta: f64) -> Result<CorrelationMatrix> {
    if !beta.is_finite() {
        return Err(Error::InfiniteBeta);
    }
    Ok(CorrelationMatrix::from(
        GeneratorFlow::new(window)?.fermi_function(beta),
    ))
}
