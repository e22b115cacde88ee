//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quantity diverges at the requested point (e.g. Li_s(1) for s <= 1).
    #[error("divergent: {0}")]
    Divergent(String),

    /// The self-consistency equation has no root in the admissible range
    /// (mu above the critical point with no source).
    #[error("no root: {0}")]
    NoRoot(String),

    /// Sign-change bracket could not be established.
    #[error("bracket expansion failed after {doublings} doublings ({context})")]
    BracketFailure { doublings: u32, context: String },

    /// The ground-mode gap E0 - mu + a*rho is not positive.
    #[error("gap violation: epsilon_0 = {gap:.6e} <= 0 (need E0 - mu + a*rho > 0)")]
    GapViolation { gap: f64 },

    /// Requested truncated Fock basis exceeds the size guard.
    #[error("basis too large: {count} states (guard {guard})")]
    BasisTooLarge { count: u128, guard: usize },

    /// Iterative scheme did not reach its tolerance.
    #[error("no convergence after {iterations} iterations: {context}")]
    NonConvergence { iterations: usize, context: String },

    /// Boundary condition not implemented.
    #[error("unsupported boundary condition: {0}")]
    UnsupportedBoundary(String),

    /// Quadrature failed to reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// Bad run configuration (CLI / config file).
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
