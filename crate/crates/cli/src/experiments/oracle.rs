use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftflow_core::fock_oracle::{
    car_residual, equivalence_residual, gibbs_comparison, jordan_wigner_residual, FockSpace,
    HeisenbergEvolver, DEFAULT_SITE_CAP,
};
use shiftflow_core::one_particle::{GeneratorFlow, Window};
use shiftflow_core::Result as CoreResult;

use super::{label, random_wave, Run};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::Check;

const SUITE: [&str; 5] = ["car", "pauli", "equivalence", "gibbs", "symmetry"];

pub(super) fn run(config: &Config) -> Result<Run> {
    let mut p = config.params();
    let sites = p.count("sites", "8")?;
    let cap = p.count("cap", &DEFAULT_SITE_CAP.to_string())?;
    let suite = p.words("suite", &SUITE.join(","), &SUITE)?;
    let samples = p.count("samples", "20")?;
    let seed = p.count("seed", "1")?;
    let betas = p.reals("beta", "0.5,1")?;
    let car_tol = p.real("car_tol", "1e-13")?;
    let equivalence_tol = p.real("equivalence_tol", "1e-9")?;
    let gibbs_tol = p.real("gibbs_tol", "1e-8")?;
    let echo = p.finish()?;

    if sites == 0 {
        return Err(CliError::invalid("sites", "need at least one site"));
    }
    if cap == 0 || cap as usize > DEFAULT_SITE_CAP {
        return Err(CliError::invalid(
            "cap",
            format!("cap must lie in 1..={DEFAULT_SITE_CAP}"),
        ));
    }
    if samples == 0 {
        return Err(CliError::invalid("samples", "need at least one sample"));
    }
    let window =
        Window::new(1, sites as i64).map_err(|e| CliError::invalid("sites", e.to_string()))?;

    // a cap violation fails each check separately; the suite goes on
    let space = FockSpace::with_cap(window, cap as usize);
    let mut checks = Vec::new();
    for name in &suite {
        match name.as_str() {
            "car" => checks.push(check("car", car_tol, &space, car_residual)),
            "pauli" => checks.push(check("pauli", car_tol, &space, jordan_wigner_residual)),
            "equivalence" => checks.push(check("equivalence", equivalence_tol, &space, |s| {
                equivalence(s, samples, seed)
            })),
            "gibbs" => {
                for &beta in &betas {
                    let name = format!("gibbs[beta={}]", label(beta));
                    checks.push(check(name, gibbs_tol, &space, |s| {
                        Ok(gibbs_comparison(s.window(), beta)?.discrepancy)
                    }));
                }
            }
            "symmetry" => checks.push(check(
                "symmetry",
                equivalence_tol,
                &space,
                spectrum_asymmetry,
            )),
            _ => unreachable!("validated against SUITE"),
        }
    }
    Ok((checks, None, echo))
}

fn check(
    name: impl Into<String>,
    tolerance: f64,
    space: &CoreResult<FockSpace>,
    residual: impl FnOnce(&FockSpace) -> CoreResult<f64>,
) -> Check {
    match space.as_ref().map_err(Clone::clone).and_then(residual) {
        Ok(v) => Check::at_most(name, v, tolerance),
        Err(e) => Check::errored(name, tolerance, e),
    }
}

fn equivalence(space: &FockSpace, samples: u64, seed: u64) -> CoreResult<f64> {
    let evolver = HeisenbergEvolver::new(&space.truncated_hamiltonian())?;
    let flow = GeneratorFlow::new(space.window())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let f = random_wave(&mut rng, space.window());
        let t = rng.random_range(-5.0..5.0);
        worst = worst.max(equivalence_residual(space, &evolver, &flow, &f, t)?);
    }
    Ok(worst)
}

/// `max_k |E_k + E_{d-1-k}|` over the sorted many-body spectrum.
fn spectrum_asymmetry(space: &FockSpace) -> CoreResult<f64> {
    let evolver = HeisenbergEvolver::new(&space.truncated_hamiltonian())?;
    let e = evolver.eigenvalues();
    Ok(e.iter()
        .zip(e.iter().rev())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max))
}
