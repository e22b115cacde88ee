//! Self-consistent density and the limiting pressure of the mean-field gas.
//!
//! Below the critical point mu_c = mu0 + a rho_c the equilibrium density is
//! the unique root of rho = rho0(mu - a rho); above it the gas condenses and
//! rho = (mu - mu0)/a. With a ground-mode source of magnitude |eta| the
//! self-consistency equation picks up |eta|^2/(a rho - mu + mu0)^2 and has a
//! root for every mu, which is what makes the source a useful regularizer:
//! the transition reappears only as eta -> 0.
//!
//! Root finding works in the gap variable t = a rho - mu + mu0 rather than
//! in rho itself: for small eta the root sits at t ~ |eta|, and recovering t
//! from a rounded rho would lose exactly the digits the source term divides
//! by. The solution carries both rho and the gap.

use crate::error::{Error, Result};
use crate::free_gas::{
    critical_density, free_density_gap, free_pressure, free_pressure_gap, DensityOfStates,
    ExtendedReal, ThermoParams,
};

/// Phase labels of the limiting gas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Normal,
    Condensed,
    Critical,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::Normal => write!(f, "NORMAL"),
            Phase::Condensed => write!(f, "CONDENSED"),
            Phase::Critical => write!(f, "CRITICAL"),
        }
    }
}

/// Limit thermodynamics at one chemical potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub mu: f64,
    pub rho: f64,
    pub pressure: f64,
    pub condensate: f64,
    pub phase: Phase,
}

/// Root of the sourced self-consistency equation at one (mu, |eta|).
///
/// `gap` is a rho - mu + mu0 carried at full precision; `residual` is the
/// defect of the defining equation evaluated in the gap parameterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcedSolution {
    pub mu: f64,
    pub eta_abs: f64,
    pub rho: f64,
    pub gap: f64,
    pub pressure: f64,
    pub residual: f64,
}

/// mu_c = mu0 + a rho_c; the infinite point for d <= 2.
pub fn critical_chemical_potential(
    params: &ThermoParams,
    dos: &DensityOfStates,
) -> Result<ExtendedReal> {
    Ok(match critical_density(params, dos)? {
        ExtendedReal::Finite(rc) => ExtendedReal::Finite(params.mu0 + params.coupling_a * rc),
        ExtendedReal::Infinite => ExtendedReal::Infinite,
    })
}

const MAX_DOUBLINGS: u32 = 200;
const MAX_BISECTIONS: usize = 2_000;
/// Relative bracket width at which bisection stops.
const GAP_REL_TOL: f64 = 1e-15;

/// Solve rho = rho0(mu - a rho) + |eta|^2/(a rho - mu + mu0)^2 for the unique
/// root with rho > max(0, (mu - mu0)/a).
///
/// With eta = 0 this requires mu <= mu_c (otherwise `NoRoot`: the caller must
/// use the condensed branch); with eta > 0 every real mu is admissible.
pub fn solve_density(
    params: &ThermoParams,
    dos: &DensityOfStates,
    mu: f64,
    eta_abs: f64,
) -> Result<SourcedSolution> {
    params.validate()?;
    if !(eta_abs >= 0.0) || !eta_abs.is_finite() {
        return Err(Error::Domain(format!("|eta| must be >= 0: {eta_abs}")));
    }
    let a = params.coupling_a;

    if eta_abs == 0.0 {
        match critical_chemical_potential(params, dos)? {
            ExtendedReal::Finite(mc) if mu > mc => {
                return Err(Error::NoRoot(format!(
                    "mu = {mu} > mu_c = {mc} with eta = 0; use the condensed branch"
                )));
            }
            ExtendedReal::Finite(mc) if mu == mc => {
                // fixed point at criticality: mu_c - a rho_c = mu0 exactly
                let rho_c = critical_density(params, dos)?
                    .finite()
                    .expect("finite at d > 2");
                return Ok(SourcedSolution {
                    mu,
                    eta_abs,
                    rho: rho_c,
                    gap: 0.0,
                    pressure: 0.5 * a * rho_c * rho_c + free_pressure(params, dos, params.mu0)?,
                    residual: 0.0,
                });
            }
            _ => {}
        }
    }

    // Work in the offset s >= 0 above the edge of the admissible range:
    //   mu <  mu0:  rho = s/a,              gap = (mu0 - mu) + s
    //   mu >= mu0:  rho = (mu - mu0 + s)/a, gap = s
    // so neither rho nor the gap ever comes out of a cancelling subtraction.
    let excess = mu - params.mu0;
    let split = |s: f64| -> (f64, f64) {
        if excess < 0.0 {
            (s / a, -excess + s)
        } else {
            ((excess + s) / a, s)
        }
    };
    // Strictly increasing in s: rho rises, rho0 falls with the gap, and the
    // source term falls with the gap.
    let defect = |s: f64| -> Result<f64> {
        let (rho, gap) = split(s);
        let mut v = rho - free_density_gap(params, dos, gap)?;
        if eta_abs > 0.0 {
            v -= (eta_abs / gap) * (eta_abs / gap);
        }
        Ok(v)
    };

    let mut lo;
    let mut hi = 1.0;
    if excess < 0.0 {
        // s = 0 is admissible (gap = mu0 - mu > 0) and the defect there is
        // -rho0(mu) - |eta|^2/gap^2 < 0.
        lo = 0.0;
    } else {
        // Shrink until the defect goes negative; the gap must stay positive.
        lo = 1.0;
        let mut halvings = 0;
        while defect(lo)? >= 0.0 {
            hi = lo;
            lo *= 0.5;
            halvings += 1;
            if halvings > MAX_DOUBLINGS {
                return Err(Error::BracketFailure {
                    doublings: MAX_DOUBLINGS,
                    context: format!(
                        "no negative defect above the gap floor (mu={mu}, eta={eta_abs})"
                    ),
                });
            }
        }
    }
    let mut doublings = 0;
    while defect(hi)? <= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BracketFailure {
                doublings: MAX_DOUBLINGS,
                context: format!("no positive defect (mu={mu}, eta={eta_abs})"),
            });
        }
    }

    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= GAP_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // machine resolution
        }
        if defect(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let s_root = 0.5 * (lo + hi);
    let (rho, gap) = split(s_root);
    let mut pressure = 0.5 * a * rho * rho + free_pressure_gap(params, dos, gap)?;
    if eta_abs > 0.0 {
        pressure += eta_abs * eta_abs / gap;
    }
    Ok(SourcedSolution {
        mu,
        eta_abs,
        rho,
        gap,
        pressure,
        residual: defect(s_root)?,
    })
}

/// The limiting pressure: piecewise in mu with the branch picked by mu_c.
///
///   p(mu) = a rho^2/2 + p0(mu - a rho)        for mu <= mu_c,
///   p(mu) = (mu - mu0)^2/(2a) + p0(mu0)       for mu >  mu_c.
pub fn limit_pressure(params: &ThermoParams, dos: &DensityOfStates, mu: f64) -> Result<PhasePoint> {
    params.validate()?;
    let a = params.coupling_a;
    match critical_chemical_potential(params, dos)? {
        ExtendedReal::Finite(mc) if mu > mc => {
            let rho = (mu - params.mu0) / a;
            let rho_c = critical_density(params, dos)?
                .finite()
                .expect("finite when mu_c is");
            Ok(PhasePoint {
                mu,
                rho,
                pressure: (mu - params.mu0) * (mu - params.mu0) / (2.0 * a)
                    + free_pressure(params, dos, params.mu0)?,
                condensate: rho - rho_c,
                phase: Phase::Condensed,
            })
        }
        ExtendedReal::Finite(mc) if mu == mc => {
            let sol = solve_density(params, dos, mu, 0.0)?;
            Ok(PhasePoint {
                mu,
                rho: sol.rho,
                pressure: sol.pressure,
                condensate: 0.0,
                phase: Phase::Critical,
            })
        }
        _ => {
            let sol = solve_density(params, dos, mu, 0.0)?;
            Ok(PhasePoint {
                mu,
                rho: sol.rho,
                pressure: sol.pressure,
                condensate: 0.0,
                phase: Phase::Normal,
            })
        }
    }
}

/// Limiting pressure with the source on:
/// a rho^2/2 + p0(mu - a rho) + |eta|^2/(a rho - mu + mu0) at the sourced root.
pub fn limit_pressure_with_source(
    params: &ThermoParams,
    dos: &DensityOfStates,
    mu: f64,
    eta_abs: f64,
) -> Result<f64> {
    if !(eta_abs > 0.0) {
        return Err(Error::Domain(format!(
            "limit_pressure_with_source needs |eta| > 0, got {eta_abs}"
        )));
    }
    Ok(solve_density(params, dos, mu, eta_abs)?.pressure)
}
