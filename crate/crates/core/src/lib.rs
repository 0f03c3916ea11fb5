//! Dynamics of two optical cavity modes coupled through a movable mirror
//! (the "mirror-in-the-middle" configuration), with and without mechanical
//! damping.
//!
//! The crate is organised around three independent layers:
//!
//! * closed forms: [`unitary`] for the lossless case, [`dissipative`] for the
//!   exact solution of the damped master equation;
//! * quantifiers: [`measures`] (purity, linear and von Neumann entropy,
//!   Wootters concurrence);
//! * a brute-force [`oracle`] that integrates the Schrödinger and Lindblad
//!   equations in a truncated Fock space, used to validate the closed forms.
//!
//! [`figures`] and [`validate`] sit on top and feed the `mim` command-line tool.
//! All times are dimensionless (scaled by the mechanical frequency).

pub mod dissipative;
pub mod error;
pub mod figures;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod par;
pub mod unitary;
pub mod validate;

mod coherent;

pub use coherent::{coherent_fock_amplitudes, minimal_cutoff, poisson_tail};
pub use error::{Error, Result};
pub use model::{
    CoherentProductState, DimensionlessParams, FockCutoff, PhysicalParams, QubitPlusProductState,
    SimulationConfig,
};
pub use par::Execution;

pub use num_complex::Complex64 as C64;
