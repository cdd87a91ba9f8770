use std::f64::consts::PI;

use shiftflow_core::one_particle::{
    apply_shift_exact, apply_shift_fft, MomentumGrid, WaveFunction, Window,
};

use super::Run;
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::{Check, Table};

pub(super) fn run(config: &Config) -> Result<Run> {
    let mut p = config.params();
    let times = p.reals("t", "0:0.25:2")?;
    let site = p.integer("site", "0")?;
    let method = p.choice("method", "exact", &["exact", "fft"])?;
    let pad = p.count("pad", "2048")?;
    let grid_points = p.count("grid", "2^14")?;
    let view = p.count("view", "8")?;
    let route_tol = p.real("route_tol", "1e-3")?;
    let echo = p.finish()?;

    let t_lo = times.iter().copied().fold(f64::INFINITY, f64::min);
    let t_hi = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let view_window = Window::new(
        site + t_lo.floor() as i64 - view as i64,
        site + t_hi.ceil() as i64 + view as i64,
    )
    .map_err(|e| CliError::invalid("view", e.to_string()))?;
    if !Window::single(site)
        .padded(pad)
        .contains_window(&view_window)
    {
        return Err(CliError::invalid(
            "pad",
            format!("pad {pad} does not cover the output sites {view_window}"),
        ));
    }
    let fft = method == "fft";
    let grid = MomentumGrid::new(grid_points as usize)
        .map_err(|e| CliError::invalid("grid", e.to_string()))?;
    if fft {
        let half = (grid_points as i64 - 1) / 2;
        let ring = Window::new(site - half, site - half + grid_points as i64 - 1)
            .map_err(|e| CliError::invalid("grid", e.to_string()))?;
        if !ring.contains_window(&view_window) {
            return Err(CliError::invalid(
                "grid",
                format!("a ring of {grid_points} sites does not cover {view_window}"),
            ));
        }
    }

    let f = WaveFunction::basis(site);
    let mut table = Table::new(vec!["t", "site", "re", "im", "abs2"]);
    let mut deficit: f64 = 0.0;
    let mut integer_error: f64 = 0.0;
    let mut route_error: f64 = 0.0;
    for &t in &times {
        let exact = apply_shift_exact(&f, t, pad)?;
        let evolved = if fft {
            apply_shift_fft(&f, t, &grid)?
        } else {
            exact.clone()
        };
        deficit = deficit.max((1.0 - evolved.norm_sqr()).abs());
        for l in view_window.sites() {
            let a = evolved.amplitude(l);
            table.push(vec![
                t.into(),
                l.into(),
                a.re.into(),
                a.im.into(),
                a.norm_sqr().into(),
            ]);
            if t.fract() == 0.0 {
                let target = if l == site + t as i64 { 1.0 } else { 0.0 };
                integer_error = integer_error.max((a.re - target).abs().max(a.im.abs()));
            }
            route_error = route_error.max((a - exact.amplitude(l)).norm());
        }
    }

    let mut checks = vec![
        Check::at_most(
            "norm_deficit",
            deficit,
            if fft {
                1e-12
            } else {
                4.5 / (PI * PI * pad as f64)
            },
        ),
        Check::at_most(
            "integer_times",
            integer_error,
            if fft { 1e-12 } else { 0.0 },
        ),
    ];
    if fft {
        checks.push(Check::at_most("route_difference", route_error, route_tol));
    }
    Ok((checks, Some(table), echo))
}
