use thiserror::Error;

use crate::one_particle::Window;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("time parameter must be finite, got {0}")]
    NonFiniteTime(f64),

    #[error("invalid window [{lo}, {hi}]: lo must not exceed hi")]
    InvalidWindow { lo: i64, hi: i64 },

    #[error("window mismatch: expected {expected}, got {found}")]
    WindowMismatch { expected: Window, found: Window },

    #[error("site {site} lies outside window {window}")]
    SiteOutsideWindow { site: i64, window: Window },

    #[error("momentum grid of {grid} points cannot hold a support of {support} sites")]
    GridTooSmall { grid: usize, support: usize },

    #[error("window of {size} sites exceeds the dense limit of {limit}")]
    WindowTooLarge { size: usize, limit: usize },

    #[error("{requested} sites requested but the Fock-space cap is {cap}")]
    SiteCapExceeded { requested: usize, cap: usize },

    #[error("spin operators need a window inside [1, inf), got {0}")]
    NonPositiveSites(Window),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not even under the grading (residual {residual:e})")]
    GradingViolation { residual: f64 },

    #[error("inverse temperature must be finite for this operation")]
    InfiniteBeta,

    #[error("denominator m + t + n vanishes at t = {t} for cutoff {cutoff}")]
    VanishingDenominator { t: f64, cutoff: u64 },

    #[error("{what}: independent routes disagree by {residual:e} (tolerance {tolerance:e})")]
    OracleMismatch {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteTime(t))
    }
}
