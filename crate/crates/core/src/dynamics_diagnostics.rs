//! Diagnostics of the flow on finite data: leakage outside a light cone,
//! leakage behind the initial support, and decay of graded commutators.

use num_complex::Complex64;

use crate::error::{check_time, Error, Result};
use crate::fock_oracle::{FockMatrix, FockSpace, HeisenbergEvolver};
use crate::implementability::least_squares;
use crate::one_particle::{apply_shift_exact, WaveFunction, Window};
use crate::summation::NeumaierSum;

/// Evenness threshold for operators handed to the commutator oracle.
pub const GRADING_TOLERANCE: f64 = 1e-12;

/// Smallest dyadic window start used in the power-law fit; earlier windows
/// still sit on the central lobe.
pub const ENVELOPE_FIT_START: f64 = 4.0;

/// Sampled decay of `|{c(f), τ_t(c*(g))}|` with an optional power-law fit
/// `values ≈ prefactor · t^{-exponent}` of the dyadic sup envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub exponent: Option<f64>,
    pub prefactor: Option<f64>,
}

impl DecayProfile {
    /// `max |value|` over grid points in `[lo, hi]`.
    pub fn sup_on(&self, lo: f64, hi: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(_, v)| *v)
            .reduce(f64::max)
    }

    /// `(T, sup over [T, 2T])` for every `T = 2^k` whose window is covered
    /// by the grid.
    pub fn dyadic_envelope(&self) -> Vec<(f64, f64)> {
        let (Some(&first), Some(&last)) = (self.times.first(), self.times.last()) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut k = first.max(f64::MIN_POSITIVE).log2().ceil() as i32;
        loop {
            let t = 2f64.powi(k);
            if 2.0 * t > last {
                break;
            }
            if t >= first {
                if let Some(s) = self.sup_on(t, 2.0 * t) {
                    out.push((t, s));
                }
            }
            k += 1;
        }
        out
    }
}

/// `Σ_j f_j (U_t g)_j`, the scalar in `{c(f), τ_t(c*(g))} = (Σ_j f_j (U_t g)_j)·1`.
pub fn odd_anticommutator_scalar(
    f: &WaveFunction,
    g: &WaveFunction,
    t: f64,
    pad: u64,
) -> Result<Complex64> {
    check_time(t)?;
    let g = g.resized(g.window().hull(&f.window()));
    let ug = apply_shift_exact(&g, t, pad)?;
    Ok(f.bilinear(&ug))
}

/// `|odd_anticommutator_scalar|` along an ascending time grid.
pub fn aa_decay_profile(
    f: &WaveFunction,
    g: &WaveFunction,
    times: &[f64],
    pad: u64,
) -> Result<DecayProfile> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    for &t in times {
        check_time(t)?;
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "time grid must be strictly ascending".into(),
        ));
    }
    let values = times
        .iter()
        .map(|&t| odd_anticommutator_scalar(f, g, t, pad).map(|z| z.norm()))
        .collect::<Result<Vec<_>>>()?;
    let mut profile = DecayProfile {
        times: times.to_vec(),
        values,
        exponent: None,
        prefactor: None,
    };
    let envelope: Vec<_> = profile
        .dyadic_envelope()
        .into_iter()
        .filter(|(t, s)| *t >= ENVELOPE_FIT_START && *s > 0.0)
        .collect();
    if envelope.len() >= 2 {
        let xs: Vec<f64> = envelope.iter().map(|(t, _)| t.ln()).collect();
        let ys: Vec<f64> = envelope.iter().map(|(_, s)| s.ln()).collect();
        let fit = least_squares(&xs, &ys);
        profile.exponent = Some(-fit.slope);
        profile.prefactor = Some(fit.intercept.exp());
    }
    Ok(profile)
}

/// `‖[A, e^{itH_W} B e^{-itH_W}]‖` on the Fock space of `window`, for even
/// `A` and `B`.
pub fn even_commutator_norm_oracle(
    window: Window,
    a: &FockMatrix,
    b: &FockMatrix,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    for op in [a, b] {
        let residual = op.odd_part_residual();
        if residual > GRADING_TOLERANCE {
            return Err(Error::GradingViolation { residual });
        }
    }
    let space = FockSpace::new(window)?;
    let evolver = HeisenbergEvolver::new(&space.truncated_hamiltonian())?;
    even_commutator_norm(&evolver, a, b, t)
}

/// Same as [`even_commutator_norm_oracle`] with a cached evolver; no
/// grading check.
pub fn even_commutator_norm(
    evolver: &HeisenbergEvolver,
    a: &FockMatrix,
    b: &FockMatrix,
    t: f64,
) -> Result<f64> {
    let bt = evolver.evolve(b, t)?;
    Ok(a.commutator(&bt)?.op_norm())
}

fn support_or_window(f: &WaveFunction) -> Window {
    f.support().unwrap_or(f.window())
}

/// Weight of `U_t f` farther than `radius` from the transported centre of
/// the support of `f`.
pub fn tail_weight(f: &WaveFunction, t: f64, radius: u64, pad: u64) -> Result<f64> {
    let centre = support_or_window(f).center() + t;
    let ut = apply_shift_exact(f, t, pad)?;
    let mut acc = NeumaierSum::new();
    for (l, a) in ut.window().sites().zip(ut.amplitudes()) {
        if (l as f64 - centre).abs() > radius as f64 {
            acc += a.norm_sqr();
        }
    }
    Ok(acc.value())
}

/// Weight of `U_t f` strictly below the lowest occupied site of `f`.
pub fn backward_leakage(f: &WaveFunction, t: f64, pad: u64) -> Result<f64> {
    check_time(t)?;
    if t <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "backward leakage needs t > 0, got {t}"
        )));
    }
    let Some(support) = f.support() else {
        return Ok(0.0);
    };
    let ut = apply_shift_exact(f, t, pad)?;
    let mut acc = NeumaierSum::new();
    for (l, a) in ut.window().sites().zip(ut.amplitudes()) {
        if l < support.lo() {
            acc += a.norm_sqr();
        }
    }
    Ok(acc.value())
}
