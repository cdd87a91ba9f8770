use std::f64::consts::PI;

use shiftflow_core::linalg::unitarity_residual;
use shiftflow_core::one_particle::{sinc_shift_coeff, GeneratorFlow, Window, DEFAULT_DENSE_LIMIT};

use super::{increases, Run};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::{Cell, Check, Table};

pub(super) fn run(config: &Config) -> Result<Run> {
    let mut p = config.params();
    let t = p.real("t", "0.5")?;
    let sizes = p.counts("sizes", "64,128,256,512")?;
    let unitarity_tol = p.real("unitarity_tol", "1e-10")?;
    let group_tol = p.real("group_tol", "1e-9")?;
    let spectrum_tol = p.real("spectrum_tol", "1e-9")?;
    let echo = p.finish()?;

    if let Some(bad) = sizes
        .iter()
        .find(|&&w| w < 2 || w as usize >= DEFAULT_DENSE_LIMIT)
    {
        return Err(CliError::invalid(
            "sizes",
            format!("window size {bad} outside 2..{DEFAULT_DENSE_LIMIT}"),
        ));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::invalid(
            "sizes",
            "sizes must be strictly ascending",
        ));
    }

    let mut table = Table::new(vec![
        "size",
        "column_error",
        "unitarity",
        "group_law",
        "max_abs_eigenvalue",
    ]);
    let mut checks = Vec::new();
    let mut errors = Vec::new();
    for &size in &sizes {
        let window = Window::centered(size / 2);
        let flow = GeneratorFlow::new(window)?;
        let u = flow.propagator(t)?;
        let column = u.column(0)?;
        let mut inside = 0.0;
        let mut captured = 0.0;
        for l in window.sites() {
            let s = sinc_shift_coeff(0, t, l);
            inside += (column.amplitude(l) - s).norm_sqr();
            captured += s * s;
        }
        let error = (inside + (1.0 - captured).max(0.0)).sqrt();
        let unitarity = unitarity_residual(u.entries());
        let group = u.compose(&u)?.max_abs_diff(&flow.propagator(2.0 * t)?)?;
        let spectral_radius = flow
            .eigenvalues()
            .iter()
            .fold(0.0f64, |a, l| a.max(l.abs()));
        table.push(vec![
            Cell::from(size),
            error.into(),
            unitarity.into(),
            group.into(),
            spectral_radius.into(),
        ]);
        errors.push(error);
        checks.push(Check::at_most(
            format!("unitarity[size={size}]"),
            unitarity,
            unitarity_tol,
        ));
        checks.push(Check::at_most(
            format!("group_law[size={size}]"),
            group,
            group_tol,
        ));
        checks.push(Check::at_most(
            format!("spectrum_in_band[size={size}]"),
            spectral_radius - PI,
            spectrum_tol,
        ));
    }
    checks.push(Check::at_most(
        "column_error_monotone",
        increases(&errors),
        0.0,
    ));
    Ok((checks, Some(table), echo))
}
