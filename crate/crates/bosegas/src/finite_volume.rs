//! Finite-volume spectra and the approximating pressure.
//!
//! On a cube of side L the one-particle energies of -Delta/2m are
//! (2pi/L)^2 |n|^2/2m (periodic, n in Z^d), (pi/L)^2 sum n_i^2/2m with
//! n_i >= 1 (Dirichlet) or n_i >= 0 (Neumann). Energies are stored as
//! (value, multiplicity) pairs keyed by the integer |n|^2, which keeps even
//! L = 14, d = 3 spectra at a few thousand distinct levels.
//!
//! The pressure of the linearized Hamiltonian at density rho and source
//! magnitude |eta| is
//!
//!   p_L(rho, eta, mu) = -(1/beta V) sum_l ln(1 - e^{-beta eps_l})
//!                       + |eta|^2/eps_0 + a rho^2/2,
//!   eps_l = E_l - mu + a rho  (all eps_l > 0 required),
//!
//! truncated at a cutoff E_max whose omitted tail is certified below
//! `target_tail` for any ground gap >= MIN_GAP. Minimization over rho runs
//! by bisection on the explicit rho-derivative, which is strictly
//! increasing because p_L is convex in rho.

use crate::error::{Error, Result};
use crate::free_gas::{DensityOfStates, ThermoParams};
use crate::mean_field::limit_pressure_with_source;
use crate::numeric::{bose_occupation, bose_variance_factor, ln_one_minus_exp_neg};

/// Boundary conditions with closed-form cube spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Periodic,
    Dirichlet,
    Neumann,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Periodic => write!(f, "PERIODIC"),
            BoundaryCondition::Dirichlet => write!(f, "DIRICHLET"),
            BoundaryCondition::Neumann => write!(f, "NEUMANN"),
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(BoundaryCondition::Periodic),
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            other => Err(Error::UnsupportedBoundary(other.to_string())),
        }
    }
}

/// Smallest ground gap for which spectrum truncation stays certified.
pub const MIN_GAP: f64 = 1e-6;

/// Truncated one-particle spectrum on a cube.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub boundary_condition: BoundaryCondition,
    pub side_length: f64,
    pub volume: f64,
    pub dim: u32,
    /// Distinct energies with multiplicities, strictly ascending.
    levels: Vec<(f64, u64)>,
    pub cutoff_energy: f64,
    /// Certified bound on the omitted-tail pressure contribution, valid for
    /// any evaluation with ground gap >= MIN_GAP.
    pub tail_bound: f64,
}

impl Spectrum {
    /// Distinct (energy, multiplicity) pairs, ascending.
    pub fn levels(&self) -> &[(f64, u64)] {
        &self.levels
    }

    pub fn ground_energy(&self) -> f64 {
        self.levels[0].0
    }

    /// Total number of modes below the cutoff.
    pub fn mode_count(&self) -> u64 {
        self.levels.iter().map(|&(_, m)| m).sum()
    }

    /// Synthetic spectrum from explicit levels (diagnostics and truncated
    /// cross-checks against the Fock-space oracle). Carries nominal geometry
    /// metadata and a zero tail bound: the given modes are the whole model.
    pub fn from_levels(levels: Vec<(f64, u64)>, volume: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("spectrum needs at least one level".into()));
        }
        if !(volume > 0.0) {
            return Err(Error::Domain(format!("volume must be positive: {volume}")));
        }
        if levels.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Domain("levels must be strictly ascending".into()));
        }
        let cutoff = levels.last().unwrap().0;
        Ok(Self {
            boundary_condition: BoundaryCondition::Periodic,
            side_length: volume,
            volume,
            dim: 1,
            levels,
            cutoff_energy: cutoff,
            tail_bound: 0.0,
        })
    }
}

/// Largest integer key |n|^2 the enumerator will accept.
const MAX_KEY: f64 = 5e7;

/// Per-axis contribution to the certified tail bound: a bound on the full
/// lattice sum of e^{-s n^2} along one axis.
fn axis_theta_bound(bc: BoundaryCondition, s: f64) -> f64 {
    let half_integral = 0.5 * (std::f64::consts::PI / s).sqrt();
    match bc {
        BoundaryCondition::Periodic => 1.0 + 2.0 * half_integral,
        BoundaryCondition::Dirichlet => half_integral,
        BoundaryCondition::Neumann => 1.0 + half_integral,
    }
}

/// Certified bound on (1/beta V) sum_{E_l > e_max} -ln(1 - e^{-beta eps_l})
/// for any gap >= MIN_GAP, using -ln(1-x) <= x/(1-x_max) and the split
/// e^{-beta E} = e^{-beta E/2} e^{-beta E/2} <= e^{-beta e_max/2} e^{-beta E/2}.
fn tail_bound_at(
    bc: BoundaryCondition,
    params: &ThermoParams,
    volume: f64,
    unit: f64,
    e0: f64,
    e_max: f64,
) -> f64 {
    let beta = params.beta;
    let d = params.dim;
    let theta = axis_theta_bound(bc, 0.5 * beta * unit);
    let x_max = (-beta * (e_max - e0 + MIN_GAP)).exp();
    if x_max >= 1.0 {
        return f64::INFINITY;
    }
    (beta * e0).exp() * theta.powi(d as i32) * (-0.5 * beta * e_max).exp()
        / (beta * volume * (1.0 - x_max))
}

/// Multiplicity table counts[k] = #{n : sum n_i^2 = k, k <= k_max} built by
/// d-fold convolution of the one-axis table.
fn key_multiplicities(bc: BoundaryCondition, dim: u32, k_max: usize) -> Vec<u64> {
    let mut axis = vec![0u64; k_max + 1];
    let n_start = match bc {
        BoundaryCondition::Dirichlet => 1,
        _ => 0,
    };
    let mut n = n_start;
    while n * n <= k_max {
        let mult = match bc {
            BoundaryCondition::Periodic => {
                if n == 0 {
                    1
                } else {
                    2
                }
            }
            _ => 1,
        };
        axis[n * n] += mult;
        n += 1;
    }

    let mut counts = axis.clone();
    for _ in 1..dim {
        let mut next = vec![0u64; k_max + 1];
        for (j, &aj) in axis.iter().enumerate() {
            if aj == 0 {
                continue;
            }
            for k in 0..=(k_max - j) {
                if counts[k] != 0 {
                    next[k + j] += aj * counts[k];
                }
            }
        }
        counts = next;
    }
    counts
}

/// Build a spectrum truncated at an explicit energy cutoff.
pub fn build_spectrum_with_cutoff(
    bc: BoundaryCondition,
    side_length: f64,
    params: &ThermoParams,
    e_max: f64,
) -> Result<Spectrum> {
    params.validate()?;
    if !(side_length > 0.0) {
        return Err(Error::Domain(format!("side length must be positive: {side_length}")));
    }
    let d = params.dim;
    let unit = match bc {
        BoundaryCondition::Periodic => {
            let k = 2.0 * std::f64::consts::PI / side_length;
            k * k / (2.0 * params.mass)
        }
        _ => {
            let k = std::f64::consts::PI / side_length;
            k * k / (2.0 * params.mass)
        }
    };
    let e0 = match bc {
        BoundaryCondition::Dirichlet => unit * d as f64,
        _ => 0.0,
    };
    if e_max <= e0 {
        return Err(Error::Domain(format!(
            "cutoff {e_max} below the ground energy {e0}"
        )));
    }
    let k_max_f = (e_max / unit).floor();
    if k_max_f > MAX_KEY {
        return Err(Error::Domain(format!(
            "cutoff asks for |n|^2 up to {k_max_f:.3e} (guard {MAX_KEY:.0e}); reduce L or the cutoff"
        )));
    }
    let k_max = k_max_f as usize;
    let counts = key_multiplicities(bc, d, k_max);
    let levels: Vec<(f64, u64)> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m != 0)
        .map(|(k, &m)| (unit * k as f64, m))
        .collect();
    if levels.is_empty() {
        return Err(Error::Domain("cutoff excludes every mode".into()));
    }
    let volume = side_length.powi(d as i32);
    Ok(Spectrum {
        boundary_condition: bc,
        side_length,
        volume,
        dim: d,
        levels,
        cutoff_energy: e_max,
        tail_bound: tail_bound_at(bc, params, volume, unit, e0, e_max),
    })
}

/// Build a spectrum with the cutoff chosen so the certified omitted-tail
/// bound is below `target_tail` for any ground gap >= MIN_GAP.
pub fn build_spectrum(
    bc: BoundaryCondition,
    side_length: f64,
    params: &ThermoParams,
    target_tail: f64,
) -> Result<Spectrum> {
    params.validate()?;
    if !(target_tail > 0.0) {
        return Err(Error::Domain(format!("target tail must be positive: {target_tail}")));
    }
    if !(side_length > 0.0) {
        return Err(Error::Domain(format!("side length must be positive: {side_length}")));
    }
    // Geometry scale, used only to seed the cutoff search.
    let unit = match bc {
        BoundaryCondition::Periodic => {
            let k = 2.0 * std::f64::consts::PI / side_length;
            k * k / (2.0 * params.mass)
        }
        _ => {
            let k = std::f64::consts::PI / side_length;
            k * k / (2.0 * params.mass)
        }
    };
    let e0 = match bc {
        BoundaryCondition::Dirichlet => unit * params.dim as f64,
        _ => 0.0,
    };
    let mut e_max = e0 + (1.0 / params.beta).max(unit);
    for _ in 0..500 {
        if tail_bound_at(bc, params, side_length.powi(params.dim as i32), unit, e0, e_max)
            <= target_tail
        {
            return build_spectrum_with_cutoff(bc, side_length, params, e_max);
        }
        e_max *= 1.5;
    }
    Err(Error::Domain(format!(
        "no cutoff reaches tail target {target_tail:.3e}"
    )))
}

/// sum_l mult * ln(1 - e^{-beta eps_l}) with eps_l = (E_l - E0) + gap.
fn log_partition_sum(spec: &Spectrum, beta: f64, gap: f64) -> f64 {
    let e0 = spec.ground_energy();
    spec.levels
        .iter()
        .map(|&(e, m)| m as f64 * ln_one_minus_exp_neg(beta * ((e - e0) + gap)))
        .sum()
}

/// sum_l mult / (e^{beta eps_l} - 1).
fn bose_sum(spec: &Spectrum, beta: f64, gap: f64) -> f64 {
    let e0 = spec.ground_energy();
    spec.levels
        .iter()
        .map(|&(e, m)| m as f64 * bose_occupation(beta * ((e - e0) + gap)))
        .sum()
}

/// sum_l mult * e^{beta eps_l}/(e^{beta eps_l} - 1)^2.
fn variance_sum(spec: &Spectrum, beta: f64, gap: f64) -> f64 {
    let e0 = spec.ground_energy();
    spec.levels
        .iter()
        .map(|&(e, m)| m as f64 * bose_variance_factor(beta * ((e - e0) + gap)))
        .sum()
}

fn gap_of(spec: &Spectrum, params: &ThermoParams, rho: f64, mu: f64) -> Result<f64> {
    let gap = spec.ground_energy() - mu + params.coupling_a * rho;
    if gap <= 0.0 {
        return Err(Error::GapViolation { gap });
    }
    Ok(gap)
}

fn pressure_given(spec: &Spectrum, params: &ThermoParams, rho: f64, gap: f64, eta_abs: f64) -> f64 {
    let mut p = -log_partition_sum(spec, params.beta, gap) / (params.beta * spec.volume);
    if eta_abs != 0.0 {
        p += eta_abs * eta_abs / gap;
    }
    p + 0.5 * params.coupling_a * rho * rho
}

/// The approximating pressure p_L(rho, eta, mu) of the linearized model.
pub fn approx_pressure(
    spec: &Spectrum,
    params: &ThermoParams,
    rho: f64,
    eta_abs: f64,
    mu: f64,
) -> Result<f64> {
    let gap = gap_of(spec, params, rho, mu)?;
    Ok(pressure_given(spec, params, rho, gap, eta_abs))
}

/// d p_L / d rho = -(a/V) sum_l (e^{beta eps_l}-1)^{-1} - a|eta|^2/eps_0^2 + a rho.
pub fn approx_pressure_drho(
    spec: &Spectrum,
    params: &ThermoParams,
    rho: f64,
    eta_abs: f64,
    mu: f64,
) -> Result<f64> {
    let gap = gap_of(spec, params, rho, mu)?;
    let a = params.coupling_a;
    Ok(-a * bose_sum(spec, params.beta, gap) / spec.volume - a * (eta_abs / gap) * (eta_abs / gap)
        + a * rho)
}

/// <N/V> in the linearized Gibbs state:
/// (1/V) sum_l (e^{beta eps_l}-1)^{-1} + |eta|^2/eps_0^2.
pub fn density_expectation(
    spec: &Spectrum,
    params: &ThermoParams,
    rho: f64,
    eta_abs: f64,
    mu: f64,
) -> Result<f64> {
    let gap = gap_of(spec, params, rho, mu)?;
    Ok(bose_sum(spec, params.beta, gap) / spec.volume + (eta_abs / gap) * (eta_abs / gap))
}

/// Minimizer of p_L over rho at fixed (eta, mu).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxMinimizer {
    pub rho_bar: f64,
    pub pressure: f64,
    /// eps_0 = E0 - mu + a rho_bar at the minimizer.
    pub gap: f64,
    pub delta_over_v2: f64,
}

/// The fluctuation quantity Delta/(2V^2) and the closed-form bound on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationBound {
    /// Delta/(2V^2) with Delta/(aV) = (beta/V) sum_l e^{beta eps}/(e^{beta eps}-1)^2
    /// + 2|eta|^2/eps_0^3.
    pub delta_half_v2: f64,
    /// 2a(4/delta + beta) rho_bar / V, delta the limiting gap (clipped to
    /// eps_0 when non-positive at finite volume).
    pub analytic_bound: f64,
}

const MAX_DOUBLINGS: u32 = 200;
const MAX_BISECTIONS: usize = 2_000;
const GAP_REL_TOL: f64 = 1e-15;

/// Minimize p_L over rho by bisection on the strictly increasing derivative.
///
/// Requires eta > 0: without the source and with mu >= E0 the infimum can sit
/// at the edge of the admissible range instead of at a stationary point.
pub fn minimize_over_density(
    spec: &Spectrum,
    params: &ThermoParams,
    eta_abs: f64,
    mu: f64,
) -> Result<ApproxMinimizer> {
    params.validate()?;
    if !(eta_abs > 0.0) {
        return Err(Error::Domain(format!(
            "minimize_over_density needs |eta| > 0, got {eta_abs}"
        )));
    }
    let a = params.coupling_a;
    let e0 = spec.ground_energy();
    let excess = mu - e0;
    // Offset s above the edge of the admissible range, as in the limit solver:
    // mu < E0: rho = s/a, gap = (E0 - mu) + s; else rho = (excess + s)/a, gap = s.
    let split = |s: f64| -> (f64, f64) {
        if excess < 0.0 {
            (s / a, -excess + s)
        } else {
            ((excess + s) / a, s)
        }
    };
    let deriv = |s: f64| -> f64 {
        let (rho, gap) = split(s);
        -a * bose_sum(spec, params.beta, gap) / spec.volume - a * (eta_abs / gap) * (eta_abs / gap)
            + a * rho
    };

    let mut lo;
    let mut hi = 1.0;
    if excess < 0.0 {
        lo = 0.0; // deriv(0) = -(a/V) sum - a eta^2/gap^2 < 0
    } else {
        lo = 1.0;
        let mut halvings = 0;
        while deriv(lo) >= 0.0 {
            hi = lo;
            lo *= 0.5;
            halvings += 1;
            if halvings > MAX_DOUBLINGS {
                return Err(Error::BracketFailure {
                    doublings: MAX_DOUBLINGS,
                    context: format!("no negative derivative (mu={mu}, eta={eta_abs})"),
                });
            }
        }
    }
    let mut doublings = 0;
    while deriv(hi) <= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BracketFailure {
                doublings: MAX_DOUBLINGS,
                context: format!("no positive derivative (mu={mu}, eta={eta_abs})"),
            });
        }
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= GAP_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if deriv(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_root = 0.5 * (lo + hi);
    let (rho_bar, gap) = split(s_root);
    let pressure = pressure_given(spec, params, rho_bar, gap, eta_abs);
    let delta = fluctuation_parts(spec, params, rho_bar, gap, eta_abs, mu);
    Ok(ApproxMinimizer {
        rho_bar,
        pressure,
        gap,
        delta_over_v2: delta.delta_half_v2,
    })
}

fn fluctuation_parts(
    spec: &Spectrum,
    params: &ThermoParams,
    rho_bar: f64,
    gap: f64,
    eta_abs: f64,
    mu: f64,
) -> FluctuationBound {
    let a = params.coupling_a;
    let v = spec.volume;
    let d2p_dmu2 = params.beta * variance_sum(spec, params.beta, gap) / v
        + 2.0 * eta_abs * eta_abs / (gap * gap * gap);
    // delta per the limiting gap; at finite volume with E0 > mu0 it can close,
    // in which case eps_0 itself is a valid (smaller) choice.
    let delta_raw = a * rho_bar - mu + params.mu0;
    let delta = if delta_raw > 0.0 { delta_raw } else { gap };
    FluctuationBound {
        delta_half_v2: a / (2.0 * v) * d2p_dmu2,
        analytic_bound: 2.0 * a * (4.0 / delta + params.beta) * rho_bar / v,
    }
}

/// Delta/(2V^2) at a computed minimizer, plus the closed-form bound
/// 2a(4/delta + beta) rho_bar / V.
pub fn fluctuation_bound(
    spec: &Spectrum,
    params: &ThermoParams,
    minimizer: &ApproxMinimizer,
    eta_abs: f64,
    mu: f64,
) -> Result<FluctuationBound> {
    if minimizer.gap <= 0.0 {
        return Err(Error::GapViolation { gap: minimizer.gap });
    }
    Ok(fluctuation_parts(
        spec,
        params,
        minimizer.rho_bar,
        minimizer.gap,
        eta_abs,
        mu,
    ))
}

/// One row of a volume-convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub side_length: f64,
    pub volume: f64,
    /// Minimized finite-volume pressure p_L(rho_bar, eta, mu).
    pub pressure_fv: f64,
    pub rho_bar: f64,
    pub gap: f64,
    pub delta_half_v2: f64,
    /// The sourced limit pressure the rows converge to.
    pub pressure_limit: f64,
    pub abs_dev: f64,
}

/// Minimized pressure, fluctuation size and distance to the sourced limit
/// for each side length in `l_list`.
pub fn convergence_study(
    bc: BoundaryCondition,
    params: &ThermoParams,
    mu: f64,
    eta_abs: f64,
    l_list: &[f64],
    target_tail: f64,
) -> Result<Vec<ConvergenceRow>> {
    if l_list.is_empty() {
        return Err(Error::Domain("L list must be nonempty".into()));
    }
    if l_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("L list must be strictly increasing".into()));
    }
    let dos = DensityOfStates::kinetic(params);
    let p_limit = limit_pressure_with_source(params, &dos, mu, eta_abs)?;
    let mut rows = Vec::with_capacity(l_list.len());
    for &l in l_list {
        let spec = build_spectrum(bc, l, params, target_tail)?;
        let min = minimize_over_density(&spec, params, eta_abs, mu)?;
        rows.push(ConvergenceRow {
            side_length: l,
            volume: spec.volume,
            pressure_fv: min.pressure,
            rho_bar: min.rho_bar,
            gap: min.gap,
            delta_half_v2: min.delta_over_v2,
            pressure_limit: p_limit,
            abs_dev: (min.pressure - p_limit).abs(),
        });
    }
    Ok(rows)
}
