//! Shifted large-l expansion of central-potential bound-state energies in
//! arbitrary precision, with Pade resummation and an independent Numerov
//! reference solver.

pub mod error;
pub mod expansion;
pub mod leading;
pub mod numerov;
pub mod pade;
pub mod potential;
pub mod real;
pub mod series;

pub use error::{PsletError, Result};
pub use expansion::{
    compute_expansion, energy_partial_sum, expand, residual_norm, wavefunction_eval,
    PsletExpansion, DEFAULT_MAX_ORDER,
};
pub use leading::{solve_leading_order, LeadingOrderSolution, StateSpec};
pub use numerov::{integrate_radial, oracle_eigenvalue, GridSpec, OracleResult};
pub use pade::{energy_pade, pade_eval, pade_fit, PadeApproximant};
pub use potential::{potential_derivatives, Potential, PotentialKind, PotentialModel};
pub use real::{set_default_digits, with_digits, working_digits, Real};
pub use series::{Poly, TruncSeries};
