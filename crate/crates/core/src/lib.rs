//! Numerical laboratory for the continuous extension of the lattice shift on
//! one-dimensional fermions.
//!
//! The integer shifts `c_j ↦ c_{j+k}` extend to a quasi-free flow `τ_t`,
//! `t ∈ R`, generated by multiplication with the momentum `k ∈ [-π, π]`. In
//! position space the flow spreads a particle over the whole lattice with
//! a sinc profile, so it is neither local nor causal at fractional times.
//!
//! * [`one_particle`]: windows, wave functions, the sinc kernel (exact and
//!   FFT routes), the generator `h` and its truncated exponentials.
//! * [`quasifree_states`]: equilibrium, ground and ceiling states, their
//!   two-point functions and the KMS boundary condition.
//! * [`fock_oracle`]: dense Fock-space ground truth on a few sites
//!   (Jordan–Wigner, truncated Hamiltonians, Gibbs states).
//! * [`implementability`]: the divergent Hilbert–Schmidt sum that rules out
//!   an inner implementation on the spin chain.
//! * [`dynamics_diagnostics`]: locality tails, backward leakage and
//!   asymptotic-abelianness decay.

pub mod dynamics_diagnostics;
pub mod error;
pub mod fock_oracle;
pub mod implementability;
pub mod linalg;
pub mod one_particle;
pub mod quadrature;
pub mod quasifree_states;
pub mod summation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
