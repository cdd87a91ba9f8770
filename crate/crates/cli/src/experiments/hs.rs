use shiftflow_core::implementability::{asymptotic_slope, hs_divergence_fit, validate_cutoffs};

use super::{increases, label, Run};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::{Cell, Check, Table};

pub(super) fn run(config: &Config) -> Result<Run> {
    let mut p = config.params();
    let requested = p.reals("t", "0.1,0.25,0.5")?;
    let cutoffs = p.counts("cutoffs", "2^10:2^20")?;
    // reduce t to [0, 1); the log slope only sees sin²(πt)
    let canonical = p.boolean("canonical", "true")?;
    let slope_tol = p.real("slope_tol", "0.1")?;
    let echo = p.finish()?;

    validate_cutoffs(&cutoffs).map_err(|e| CliError::invalid("cutoffs", e.to_string()))?;
    let largest = *cutoffs.last().expect("validated nonempty") as f64;
    let times: Vec<f64> = requested
        .iter()
        .map(|&t| if canonical { t - t.floor() } else { t })
        .collect();
    for &t in &times {
        if t.fract() == 0.0 && t <= -2.0 && -t <= 2.0 * largest {
            return Err(CliError::invalid(
                "t",
                format!("t = {t} makes m + n + t vanish for some m, n <= {largest}"),
            ));
        }
    }

    let mut table = Table::new(vec!["t", "M", "I", "slope", "stderr"]);
    let mut checks = Vec::new();
    for &t in &times {
        let series = hs_divergence_fit(t, &cutoffs)?;
        for (&m, &sum) in series.cutoffs.iter().zip(&series.partial_sums) {
            table.push(vec![
                t.into(),
                Cell::from(m),
                sum.into(),
                series.fitted_slope.into(),
                series.slope_stderr.into(),
            ]);
        }
        let name = label(t);
        if t.fract() == 0.0 {
            let worst = series
                .partial_sums
                .iter()
                .fold(0.0f64, |a, b| a.max(b.abs()));
            checks.push(Check::at_most(format!("zero_sum[t={name}]"), worst, 0.0));
        } else {
            let rel = (series.fitted_slope / asymptotic_slope(t) - 1.0).abs();
            checks.push(Check::at_most(format!("slope[t={name}]"), rel, slope_tol));
            let stalls = (series.partial_sums.len() - 1) as f64 - increases(&series.partial_sums);
            checks.push(Check::at_most(format!("increasing[t={name}]"), stalls, 0.0));
        }
    }
    Ok((checks, Some(table), echo))
}
