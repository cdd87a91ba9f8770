use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shiftflow_core::one_particle::{WaveFunction, Window};
use shiftflow_core::quasifree_states::{kms_sides, QuasiFreeState};

use super::{label, random_wave, Run};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::{Cell, Check, Table};

pub(super) fn run(config: &Config) -> Result<Run> {
    let mut p = config.params();
    let betas = p.reals("beta", "0.5,1,2")?;
    let times = p.reals("t", "0,0.3,1.7")?;
    let random_pairs = p.count("random_pairs", "1")?;
    let seed = p.count("seed", "7")?;
    let radius = p.count("radius", "3")?;
    let tol = p.real("tol", "1e-8")?;
    let echo = p.finish()?;

    if radius > 64 {
        return Err(CliError::invalid(
            "radius",
            "support radius above 64 is not supported",
        ));
    }
    let states = betas
        .iter()
        .map(|&b| QuasiFreeState::new(b).map_err(|e| CliError::invalid("beta", e.to_string())))
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = Window::centered(radius);
    let mut pairs = vec![(WaveFunction::basis(0), WaveFunction::basis(0))];
    for _ in 0..random_pairs {
        let f = random_wave(&mut rng, window);
        let g = random_wave(&mut rng, window);
        pairs.push((f, g));
    }

    let mut table = Table::new(vec![
        "beta", "t", "pair", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual",
    ]);
    let mut checks = Vec::new();
    for state in &states {
        for &t in &times {
            for (k, (f, g)) in pairs.iter().enumerate() {
                let (lhs, rhs) = kms_sides(state, f, g, t)?;
                let residual = (lhs - rhs).norm();
                table.push(vec![
                    state.beta().into(),
                    t.into(),
                    Cell::from(k as u64),
                    lhs.re.into(),
                    lhs.im.into(),
                    rhs.re.into(),
                    rhs.im.into(),
                    residual.into(),
                ]);
                checks.push(Check::at_most(
                    format!("kms[beta={},t={},pair={k}]", label(state.beta()), label(t)),
                    residual,
                    tol,
                ));
            }
        }
    }
    Ok((checks, Some(table), echo))
}
