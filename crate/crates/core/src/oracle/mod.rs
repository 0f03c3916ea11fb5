//! Brute-force reference solutions, independent of the closed forms: direct
//! integration of the Schrödinger and master equations in a truncated Fock
//! space, partial traces, quadrature of the auxiliary integrals and scalar
//! ODE integration of the coefficient equations.

pub mod fock;
pub mod hamiltonian;
pub mod integrate;
pub mod quadrature;
pub mod scalar_ode;
pub mod sparse;

pub use fock::{partial_trace, FockDensityMatrix, FockStateVector, Mode};
pub use hamiltonian::{build_hamiltonian, build_hamiltonian_sparse, lowering};
pub use integrate::{
    integrate_lindblad, integrate_schrodinger, IntegratorConfig, LindbladIntegrator, Scheme,
    SchrodingerIntegrator,
};
pub use quadrature::quadrature_xi_gamma;
pub use scalar_ode::{integrate_coefficient_ode, integrate_mirror_amplitude};
pub use sparse::SparseOperator;
