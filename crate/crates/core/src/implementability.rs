//! The Hilbert–Schmidt obstruction for the spin-chain extension.
//!
//! An inner implementation of the flow on the spin chain would force the
//! corner of `U_t` that maps the right half-line `{n ≥ 1}` to the left
//! half-line `{-m ≤ -1}` to be Hilbert–Schmidt:
//!
//! ```text
//! I_t = Σ_{m,n ≥ 1} |(e_{-m}, U_t e_n)|² = (sin²(πt)/π²) Σ_{m,n ≥ 1} 1/(m + n + t)² < ∞.
//! ```
//!
//! The double sum diverges for every non-integer `t`. Grouping by the
//! anti-diagonal `s = m + n` (multiplicity `s - 1` until the cutoff bites)
//! shows the truncated sum grows like `ln M`, so `I_t(M) ≈ (sin²(πt)/π²) ln M`.
//! This module evaluates the truncated sums and fits that slope; it does not
//! (and cannot) prove anything about the infinite system.

use std::f64::consts::PI;

use crate::error::{check_time, Error, Result};
use crate::one_particle::{matrix_element_u, sin_pi};
use crate::summation::NeumaierSum;

/// Truncated sums of `I_t` against `ln M`, with a least-squares slope.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceSeries {
    pub t: f64,
    pub cutoffs: Vec<u64>,
    pub partial_sums: Vec<f64>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

/// `sin²(πt)/π²`, the coefficient of `ln M` in `I_t(M)`.
pub fn asymptotic_slope(t: f64) -> f64 {
    let s = sin_pi(t);
    s * s / (PI * PI)
}

fn check_cutoff(t: f64, cutoff: u64) -> Result<()> {
    check_time(t)?;
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff M must be at least 1".into()));
    }
    // m + n + t = 0 needs t = -s with 2 <= s <= 2M
    if t.fract() == 0.0 && t <= -2.0 && -t <= 2.0 * cutoff as f64 {
        return Err(Error::VanishingDenominator { t, cutoff });
    }
    Ok(())
}

/// `I_t(M) = (1/π²) Σ_{m,n=1}^{M} sin²(πt)/(m + n + t)²` in `O(M)` operations.
pub fn hs_partial_sum(t: f64, cutoff: u64) -> Result<f64> {
    check_cutoff(t, cutoff)?;
    let prefactor = asymptotic_slope(t);
    if prefactor == 0.0 {
        return Ok(0.0);
    }
    let m = cutoff;
    let mut acc = NeumaierSum::new();
    // s = m + n runs over 2..=2M with multiplicity min(s - 1, 2M + 1 - s);
    // summed from the small tail terms up
    for s in (2..=2 * m).rev() {
        let mult = (s - 1).min(2 * m + 1 - s) as f64;
        let d = s as f64 + t;
        acc += mult / (d * d);
    }
    Ok(prefactor * acc.value())
}

/// `Σ_{m,n=1}^{M} |(e_{-m}, U_t e_n)|²` term by term, `O(M²)`.
pub fn hs_partial_sum_termwise(t: f64, cutoff: u64) -> Result<f64> {
    check_cutoff(t, cutoff)?;
    let mut acc = NeumaierSum::new();
    for m in 1..=cutoff {
        for n in 1..=cutoff {
            acc += matrix_element_u(m, n, t)?.norm_sqr();
        }
    }
    Ok(acc.value())
}

/// `|termwise − diagonal|` for the same `(t, M)`.
pub fn hs_sum_vs_kernel_crosscheck(t: f64, cutoff: u64) -> Result<f64> {
    Ok((hs_partial_sum_termwise(t, cutoff)? - hs_partial_sum(t, cutoff)?).abs())
}

/// Validates a cutoff list: at least four strictly ascending entries
/// spanning three octaves.
pub fn validate_cutoffs(cutoffs: &[u64]) -> Result<()> {
    if cutoffs.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 cutoffs, got {}",
            cutoffs.len()
        )));
    }
    if cutoffs[0] == 0 {
        return Err(Error::InvalidArgument("cutoffs must be positive".into()));
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "cutoffs must be strictly ascending".into(),
        ));
    }
    if cutoffs[cutoffs.len() - 1] < 8 * cutoffs[0] {
        return Err(Error::InvalidArgument(
            "cutoffs must span at least three octaves".into(),
        ));
    }
    Ok(())
}

/// Least-squares fit of `I_t(M)` against `ln M`.
pub fn hs_divergence_fit(t: f64, cutoffs: &[u64]) -> Result<DivergenceSeries> {
    validate_cutoffs(cutoffs)?;
    let partial_sums = cutoffs
        .iter()
        .map(|&m| hs_partial_sum(t, m))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = cutoffs.iter().map(|&m| (m as f64).ln()).collect();
    let fit = least_squares(&xs, &partial_sums);
    Ok(DivergenceSeries {
        t,
        cutoffs: cutoffs.to_vec(),
        partial_sums,
        fitted_slope: fit.slope,
        slope_stderr: fit.stderr,
        intercept: fit.intercept,
    })
}

/// `2^lo, 2^{lo+1}, …, 2^hi`.
pub fn dyadic_cutoffs(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|k| 1u64 << k).collect()
}

pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if xs.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit {
        slope,
        intercept,
        stderr,
    }
}
