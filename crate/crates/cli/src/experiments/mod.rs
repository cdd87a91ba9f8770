use std::collections::BTreeMap;

use clap::ValueEnum;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shiftflow_core::one_particle::{WaveFunction, Window};
use shiftflow_core::Complex64;

use crate::config::Config;
use crate::error::Result;
use crate::report::{Check, Report, Table};

mod evolve;
mod generator;
mod hs;
mod kms;
mod oracle;
mod profiles;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Evolve a basis vector along a time grid.
    Evolve,
    /// Truncated Hilbert–Schmidt sums and their log slope.
    HsDivergence,
    /// Fock-space ground-truth checks.
    OracleSuite,
    /// Decay of the odd-sector anticommutator.
    AaProfile,
    /// Weight outside the light cone and behind the support.
    TailProfile,
    /// KMS boundary condition of the equilibrium states.
    KmsCheck,
    /// Truncated generator against the sinc kernel.
    GeneratorCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::HsDivergence => "hs-divergence",
            Experiment::OracleSuite => "oracle-suite",
            Experiment::AaProfile => "aa-profile",
            Experiment::TailProfile => "tail-profile",
            Experiment::KmsCheck => "kms-check",
            Experiment::GeneratorCheck => "generator-check",
        }
    }

    /// Whether the experiment emits a data table besides its checks.
    pub fn has_table(self) -> bool {
        self != Experiment::OracleSuite
    }

    pub fn default_format(self) -> Format {
        match self {
            Experiment::OracleSuite | Experiment::KmsCheck | Experiment::GeneratorCheck => {
                Format::Json
            }
            _ => Format::Csv,
        }
    }
}

/// Checks, optional data table and the effective configuration.
type Run = (Vec<Check>, Option<Table>, BTreeMap<String, String>);

/// Checks plus, for series experiments, the data table.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub table: Option<Table>,
}

pub fn run(experiment: Experiment, config: &Config) -> Result<Outcome> {
    let (checks, table, echo) = match experiment {
        Experiment::Evolve => evolve::run(config)?,
        Experiment::HsDivergence => hs::run(config)?,
        Experiment::OracleSuite => oracle::run(config)?,
        Experiment::AaProfile => profiles::run_aa(config)?,
        Experiment::TailProfile => profiles::run_tail(config)?,
        Experiment::KmsCheck => kms::run(config)?,
        Experiment::GeneratorCheck => generator::run(config)?,
    };
    Ok(Outcome {
        report: Report {
            experiment: experiment.name(),
            checks,
            config_echo: echo,
        },
        table,
    })
}

/// Shortest round-trip rendering of a parameter for check names.
pub(crate) fn label(x: f64) -> String {
    format!("{x}")
}

/// Number of strict increases along a sequence.
pub(crate) fn increases(values: &[f64]) -> f64 {
    values.windows(2).filter(|w| w[1] > w[0]).count() as f64
}

/// Normalized vector with uniform real and imaginary parts in `[-1, 1)`.
pub(crate) fn random_wave(rng: &mut ChaCha8Rng, window: Window) -> WaveFunction {
    let f = WaveFunction::from_fn(window, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let n = f.norm();
    WaveFunction::from_fn(window, |j| f.amplitude(j) / n)
}
