//! Numerical laboratory for the imperfect (mean-field) Bose gas.
//!
//! The model is the free Bose gas plus the density-squared interaction
//! (a/2V) N^2 in the grand-canonical ensemble. The crate computes its
//! thermodynamic-limit pressure from the self-consistency equation
//! rho = rho0(mu - a rho), studies the finite-volume linearized
//! (approximating) Hamiltonian with a symmetry-breaking source on the
//! ground mode, and verifies the underlying operator inequalities by exact
//! diagonalization on truncated Fock spaces.
//!
//! - [`free_gas`]: ideal-gas pressure/density via polylogarithms plus an
//!   independent adaptive-quadrature route.
//! - [`mean_field`]: self-consistent density, critical point, limiting
//!   pressure with and without the ground-mode source.
//! - [`finite_volume`]: cube Laplacian spectra, the approximating pressure
//!   and its minimization over density, fluctuation bounds, convergence
//!   studies toward the limit.
//! - [`fock_oracle`]: dense exact diagonalization of the full, sourced and
//!   approximating Hamiltonians on truncated occupation-number bases.
//! - [`cli`]: sweep runners emitting CSV/JSON.

pub mod cli;
pub mod error;
pub mod finite_volume;
pub mod fock_oracle;
pub mod free_gas;
pub mod mean_field;
pub mod numeric;
pub mod quad;
pub mod special;
pub mod study;

mod linalg;

pub use error::{Error, Result};
pub use free_gas::{DensityOfStates, ExtendedReal, ThermoParams};
