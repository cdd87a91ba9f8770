use std::f64::consts::PI;

use shiftflow_core::dynamics_diagnostics::{
    aa_decay_profile, backward_leakage, odd_anticommutator_scalar, tail_weight,
};
use shiftflow_core::implementability::asymptotic_slope;
use shiftflow_core::one_particle::WaveFunction;

use super::{increases, label, Run};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::{Cell, Check, Table};

/// Dyadic windows `[T, 2T]` enter the envelope check from this `T` on.
const ENVELOPE_START: f64 = 8.0;

pub(super) fn run_aa(config: &Config) -> Result<Run> {
    let mut p = config.params();
    let i = p.integer("i", "0")?;
    let j = p.integer("j", "0")?;
    let times = p.reals("t", "0.015625:0.015625:128")?;
    let pad = p.count("pad", "256")?;
    let envelope_tol = p.real("envelope_tol", "1.05")?;
    let zero_tol = p.real("zero_tol", "1e-12")?;
    let exponent_tol = p.real("exponent_tol", "0.1")?;
    let echo = p.finish()?;

    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::invalid(
            "t",
            "time grid must be strictly ascending",
        ));
    }

    let f = WaveFunction::basis(i);
    let g = WaveFunction::basis(j);
    let profile = aa_decay_profile(&f, &g, &times, pad)?;
    let mut table = Table::new(vec!["t", "value", "re", "im"]);
    let mut zero_error: Option<f64> = None;
    for (&t, &v) in profile.times.iter().zip(&profile.values) {
        let z = odd_anticommutator_scalar(&f, &g, t, pad)?;
        table.push(vec![t.into(), v.into(), z.re.into(), z.im.into()]);
        if t.fract() == 0.0 && j as f64 + t - i as f64 != 0.0 {
            zero_error = Some(zero_error.unwrap_or(0.0).max(v));
        }
    }

    let mut checks = Vec::new();
    let envelope = profile
        .dyadic_envelope()
        .into_iter()
        .filter(|(t, _)| *t >= ENVELOPE_START)
        .map(|(t, sup)| PI * t * sup)
        .reduce(f64::max);
    if let Some(worst) = envelope {
        checks.push(Check::at_most("dyadic_envelope", worst, envelope_tol));
    }
    if let Some(worst) = zero_error {
        checks.push(Check::at_most("integer_zeros", worst, zero_tol));
    }
    if let Some(e) = profile.exponent {
        checks.push(Check::at_most(
            "decay_exponent",
            (e - 1.0).abs(),
            exponent_tol,
        ));
    }
    Ok((checks, Some(table), echo))
}

pub(super) fn run_tail(config: &Config) -> Result<Run> {
    let mut p = config.params();
    let times = p.reals("t", "0.5")?;
    let mut radii = p.counts("radii", "100,1000,10000")?;
    let pad_factor = p.count("pad_factor", "100")?;
    let site = p.integer("site", "0")?;
    let tail_tol = p.real("tail_tol", "0.2")?;
    let zero_tol = p.real("zero_tol", "1e-14")?;
    let echo = p.finish()?;

    if let Some(t) = times.iter().find(|t| **t <= 0.0) {
        return Err(CliError::invalid(
            "t",
            format!("backward leakage needs t > 0, got {t}"),
        ));
    }
    if radii.contains(&0) {
        return Err(CliError::invalid("radii", "radii must be positive"));
    }
    if pad_factor == 0 {
        return Err(CliError::invalid("pad_factor", "must be positive"));
    }
    radii.sort_unstable();
    radii.dedup();
    let largest_pad = radii.last().expect("nonempty").saturating_mul(pad_factor);
    if largest_pad > 100_000_000 {
        return Err(CliError::invalid(
            "pad_factor",
            format!("largest pad {largest_pad} exceeds 1e8 sites"),
        ));
    }

    let f = WaveFunction::basis(site);
    let mut table = Table::new(vec!["t", "R", "tail", "scaled", "target", "backward"]);
    let mut checks = Vec::new();
    for &t in &times {
        let target = 2.0 * asymptotic_slope(t);
        let backward = backward_leakage(&f, t, largest_pad)?;
        let mut tails = Vec::new();
        for &r in &radii {
            let tail = tail_weight(&f, t, r, r * pad_factor)?;
            let scaled = r as f64 * tail;
            tails.push(tail);
            table.push(vec![
                t.into(),
                Cell::from(r),
                tail.into(),
                scaled.into(),
                target.into(),
                backward.into(),
            ]);
        }
        let name = label(t);
        if t.fract() == 0.0 {
            let worst = tails.iter().copied().fold(0.0, f64::max);
            checks.push(Check::at_most(
                format!("tail_zero[t={name}]"),
                worst,
                zero_tol,
            ));
            checks.push(Check::at_most(
                format!("backward_zero[t={name}]"),
                backward,
                zero_tol,
            ));
        } else {
            let worst = radii
                .iter()
                .zip(&tails)
                .map(|(&r, &tail)| (r as f64 * tail / target - 1.0).abs())
                .fold(0.0, f64::max);
            checks.push(Check::at_most(
                format!("scaled_tail[t={name}]"),
                worst,
                tail_tol,
            ));
        }
        checks.push(Check::at_most(
            format!("monotone[t={name}]"),
            increases(&tails),
            0.0,
        ));
    }
    Ok((checks, Some(table), echo))
}
