//! Ideal Bose gas thermodynamics from the integrated density of states.
//!
//! For the kinetic dispersion eta = k^2/2m on R^d the density of states per
//! unit volume is F(d eta) = C_d eta^(d/2-1) d eta with
//! C_d = (m/2pi)^(d/2) / Gamma(d/2), and the grand-canonical pressure and
//! density at chemical potential mu <= mu0 reduce to polylogarithms:
//!
//!   p0(mu)   = beta^-1 lambda^-d Li_{d/2+1}(z),
//!   rho0(mu) = lambda^-d Li_{d/2}(z),        z = e^{beta (mu - mu0)},
//!
//! lambda = sqrt(2 pi beta / m) the thermal wavelength. Both also come with
//! a direct adaptive-quadrature route over the defining integrals, kept as
//! an independent cross-check of the closed forms.

use crate::error::{Error, Result};
use crate::numeric::{bose_occupation, ln_one_minus_exp_neg};
use crate::quad::adaptive_quadrature;
use crate::special::{gamma, riemann_zeta};

/// Physical context: inverse temperature, mass, mean-field coupling,
/// dimension, and the spectral infimum mu0 (hbar = 1 throughout).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoParams {
    pub beta: f64,
    pub mass: f64,
    pub coupling_a: f64,
    pub dim: u32,
    pub mu0: f64,
}

impl ThermoParams {
    pub fn new(beta: f64, mass: f64, coupling_a: f64, dim: u32, mu0: f64) -> Result<Self> {
        let p = Self {
            beta,
            mass,
            coupling_a,
            dim,
            mu0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::Domain(format!("beta must be positive: {}", self.beta)));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::Domain(format!("mass must be positive: {}", self.mass)));
        }
        if !(self.coupling_a > 0.0) || !self.coupling_a.is_finite() {
            return Err(Error::Domain(format!(
                "coupling a must be positive: {}",
                self.coupling_a
            )));
        }
        if self.dim < 1 {
            return Err(Error::Domain("dimension must be >= 1".into()));
        }
        if !self.mu0.is_finite() {
            return Err(Error::Domain(format!("mu0 must be finite: {}", self.mu0)));
        }
        Ok(())
    }

    /// Thermal wavelength lambda = sqrt(2 pi beta / m).
    pub fn thermal_wavelength(&self) -> f64 {
        (2.0 * std::f64::consts::PI * self.beta / self.mass).sqrt()
    }
}

/// Density of states F(d eta) = prefactor * eta^(dim/2 - 1) d eta on eta >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOfStates {
    pub dim: u32,
    pub prefactor: f64,
}

impl DensityOfStates {
    /// The kinetic DOS for dispersion k^2/2m: C_d = (m/2pi)^(d/2)/Gamma(d/2).
    pub fn kinetic(params: &ThermoParams) -> Self {
        let d = params.dim as f64;
        let c = (params.mass / (2.0 * std::f64::consts::PI)).powf(d / 2.0) / gamma(d / 2.0);
        Self {
            dim: params.dim,
            prefactor: c,
        }
    }

    /// prefactor * Gamma(d/2) * beta^(-d/2): the factor turning Li into the
    /// integrated DOS value.
    fn energy_factor(&self, beta: f64) -> f64 {
        let d = self.dim as f64;
        self.prefactor * gamma(d / 2.0) * beta.powf(-d / 2.0)
    }
}

/// Pressure, density and chemical potential of the free gas at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeGasValue {
    pub pressure: f64,
    pub density: f64,
    pub chemical_potential: f64,
}

/// A real value that may be the distinguished point at infinity
/// (critical density and critical chemical potential for d <= 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::Infinite => None,
        }
    }

    /// Collapse to f64, mapping the infinite point to f64::INFINITY.
    pub fn as_f64(&self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => *v,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

/// Fugacities up to this value are summed directly; beyond it the
/// expansion around z = 1 takes over.
const SERIES_FUGACITY_MAX: f64 = 0.99;
const SERIES_MAX_TERMS: usize = 500_000;
const EXPANSION_MAX_TERMS: usize = 40;

/// Polylogarithm Li_s(z) = sum_{n>=1} z^n / n^s for s > 0, 0 <= z <= 1.
///
/// Absolute accuracy ~1e-14 on this domain; diverges at z = 1 for s <= 1.
pub fn polylog(s: f64, z: f64) -> Result<f64> {
    if !z.is_finite() || !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("fugacity out of [0, 1]: {z}")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("polylog order must be positive: {s}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        if s <= 1.0 {
            return Err(Error::Divergent(format!("Li_{s}(1) diverges for s <= 1")));
        }
        return Ok(riemann_zeta(s));
    }
    if s == 1.0 {
        // Li_1(z) = -ln(1-z)
        return Ok(-(-z).ln_1p());
    }
    if z <= SERIES_FUGACITY_MAX {
        Ok(polylog_series(s, z))
    } else {
        Ok(polylog_near_unit(s, -z.ln()))
    }
}

/// Li_s(e^(-alpha)) with the exponent supplied directly, alpha >= 0.
///
/// Equivalent to `polylog(s, exp(-alpha))` but stable as alpha -> 0, where
/// the fugacity itself would round to 1 and lose the gap entirely.
pub fn polylog_exp(s: f64, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("exponent must be >= 0: {alpha}")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("polylog order must be positive: {s}")));
    }
    if alpha == 0.0 {
        if s <= 1.0 {
            return Err(Error::Divergent(format!("Li_{s}(1) diverges for s <= 1")));
        }
        return Ok(riemann_zeta(s));
    }
    if s == 1.0 {
        // -ln(1 - e^-alpha), keeping full precision in alpha
        let one_minus_z = -(-alpha).exp_m1();
        return Ok(-one_minus_z.ln());
    }
    let z = (-alpha).exp();
    if z == 0.0 {
        return Ok(0.0);
    }
    if z <= SERIES_FUGACITY_MAX {
        Ok(polylog_series(s, z))
    } else {
        Ok(polylog_near_unit(s, alpha))
    }
}

fn polylog_series(s: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zp = 1.0;
    for n in 1..=SERIES_MAX_TERMS {
        zp *= z;
        let term = zp / (n as f64).powf(s);
        sum += term;
        // remaining tail <= z^(n+1)/((n+1)^s (1-z)) <= z*term/(1-z)
        if term * z / (1.0 - z) < 1e-17 * sum.max(1e-300) {
            break;
        }
    }
    sum
}

/// Expansion of Li_s(e^-alpha) around alpha = 0 (z in (0.99, 1)):
///   non-integer s: Gamma(1-s) alpha^(s-1) + sum_k zeta(s-k) (-alpha)^k / k!
///   integer s = n: (-alpha)^(n-1)/(n-1)! (H_{n-1} - ln alpha)
///                  + sum_{k != n-1} zeta(n-k) (-alpha)^k / k!
fn polylog_near_unit(s: f64, alpha: f64) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 0.02);
    let rounded = s.round();
    let is_integer = (s - rounded).abs() < 1e-12 && rounded >= 2.0;

    let mut sum;
    let skip_k: Option<usize>;
    if is_integer {
        let n = rounded as usize;
        let mut factorial = 1.0;
        let mut harmonic = 0.0;
        for j in 1..n {
            factorial *= j as f64;
            harmonic += 1.0 / j as f64;
        }
        let mut lead = (harmonic - alpha.ln()) / factorial;
        if (n - 1) % 2 == 1 {
            lead = -lead;
        }
        sum = lead * alpha.powi(n as i32 - 1);
        skip_k = Some(n - 1);
    } else {
        sum = gamma(1.0 - s) * alpha.powf(s - 1.0);
        skip_k = None;
    }

    let mut pow = 1.0; // (-alpha)^k / k!
    let mut small_streak = 0;
    for k in 0..=EXPANSION_MAX_TERMS {
        if skip_k != Some(k) {
            let term = riemann_zeta(s - k as f64) * pow;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs().max(1e-300) {
                small_streak += 1;
                if small_streak >= 2 {
                    break;
                }
            } else {
                small_streak = 0;
            }
        }
        pow *= -alpha / (k as f64 + 1.0);
    }
    sum
}

/// Free-gas pressure p0(mu0 - gap) with the spectral gap supplied directly.
///
/// The stable entry for near-critical evaluation: callers that know the gap
/// avoid the cancellation in mu0 - mu.
pub fn free_pressure_gap(params: &ThermoParams, dos: &DensityOfStates, gap: f64) -> Result<f64> {
    params.validate()?;
    if !(gap >= 0.0) {
        return Err(Error::Domain(format!("gap must be >= 0: {gap}")));
    }
    let s = dos.dim as f64 / 2.0 + 1.0; // > 1, finite even at gap = 0
    let li = polylog_exp(s, params.beta * gap)?;
    Ok(dos.energy_factor(params.beta) / params.beta * li)
}

/// Free-gas density rho0(mu0 - gap) with the spectral gap supplied directly.
pub fn free_density_gap(params: &ThermoParams, dos: &DensityOfStates, gap: f64) -> Result<f64> {
    params.validate()?;
    if !(gap >= 0.0) {
        return Err(Error::Domain(format!("gap must be >= 0: {gap}")));
    }
    let s = dos.dim as f64 / 2.0;
    let li = polylog_exp(s, params.beta * gap)?;
    Ok(dos.energy_factor(params.beta) * li)
}

/// Free-gas pressure p0(mu) for mu <= mu0, via the polylog closed form.
pub fn free_pressure(params: &ThermoParams, dos: &DensityOfStates, mu: f64) -> Result<f64> {
    if mu > params.mu0 {
        return Err(Error::Domain(format!(
            "mu = {mu} above the spectral infimum mu0 = {}",
            params.mu0
        )));
    }
    free_pressure_gap(params, dos, params.mu0 - mu)
}

/// Free-gas density rho0(mu) for mu <= mu0; diverges at mu = mu0 if d <= 2.
pub fn free_density(params: &ThermoParams, dos: &DensityOfStates, mu: f64) -> Result<f64> {
    if mu > params.mu0 {
        return Err(Error::Domain(format!(
            "mu = {mu} above the spectral infimum mu0 = {}",
            params.mu0
        )));
    }
    free_density_gap(params, dos, params.mu0 - mu)
}

/// Pressure, density and mu bundled.
pub fn free_gas_value(
    params: &ThermoParams,
    dos: &DensityOfStates,
    mu: f64,
) -> Result<FreeGasValue> {
    Ok(FreeGasValue {
        pressure: free_pressure(params, dos, mu)?,
        density: free_density(params, dos, mu)?,
        chemical_potential: mu,
    })
}

/// Critical density rho_c = lim_{mu -> mu0} rho0(mu): finite only for d > 2.
pub fn critical_density(params: &ThermoParams, dos: &DensityOfStates) -> Result<ExtendedReal> {
    params.validate()?;
    if dos.dim <= 2 {
        return Ok(ExtendedReal::Infinite);
    }
    Ok(ExtendedReal::Finite(free_density(params, dos, params.mu0)?))
}

/// Upper integration limit: the integrands decay like e^(-beta eta) relative
/// to their own scale, so beta*eta_max ~ 50 pins the tail far below 1e-9.
fn quadrature_cutoff(params: &ThermoParams, dos: &DensityOfStates) -> f64 {
    (50.0 + 3.0 * dos.dim as f64) / params.beta
}

const QUAD_REL_TOL: f64 = 5e-11;

/// Pressure by adaptive quadrature of the defining integral
/// (1/beta) * int -ln(1 - e^{-beta(eta - (mu - mu0))}) F(d eta).
pub fn free_pressure_quadrature(
    params: &ThermoParams,
    dos: &DensityOfStates,
    mu: f64,
) -> Result<f64> {
    params.validate()?;
    if mu > params.mu0 {
        return Err(Error::Domain(format!(
            "mu = {mu} above the spectral infimum mu0 = {}",
            params.mu0
        )));
    }
    let beta = params.beta;
    let shift = mu - params.mu0; // <= 0
    let half_exp = dos.dim as f64 / 2.0 - 1.0;
    let q = adaptive_quadrature(
        |eta| -ln_one_minus_exp_neg(beta * (eta - shift)) * eta.powf(half_exp),
        0.0,
        quadrature_cutoff(params, dos),
        QUAD_REL_TOL,
        1e-300,
    )?;
    Ok(q.value * dos.prefactor / beta)
}

/// Density by adaptive quadrature of int 1/(e^{beta(eta - (mu-mu0))} - 1) F(d eta).
pub fn free_density_quadrature(
    params: &ThermoParams,
    dos: &DensityOfStates,
    mu: f64,
) -> Result<f64> {
    params.validate()?;
    if mu > params.mu0 {
        return Err(Error::Domain(format!(
            "mu = {mu} above the spectral infimum mu0 = {}",
            params.mu0
        )));
    }
    if mu == params.mu0 && dos.dim <= 2 {
        return Err(Error::Divergent(format!(
            "rho0 diverges at mu = mu0 for d = {} <= 2",
            dos.dim
        )));
    }
    let beta = params.beta;
    let shift = mu - params.mu0;
    let half_exp = dos.dim as f64 / 2.0 - 1.0;
    let q = adaptive_quadrature(
        |eta| bose_occupation(beta * (eta - shift)) * eta.powf(half_exp),
        0.0,
        quadrature_cutoff(params, dos),
        QUAD_REL_TOL,
        1e-300,
    )?;
    Ok(q.value * dos.prefactor)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// beta = 1, m = 2pi gives lambda = 1 so prefactors drop out.
    fn unit_lambda(dim: u32) -> (ThermoParams, DensityOfStates) {
        let p = ThermoParams::new(1.0, 2.0 * std::f64::consts::PI, 1.0, dim, 0.0).unwrap();
        let dos = DensityOfStates::kinetic(&p);
        (p, dos)
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    /// Independent polylog oracle: direct partial summation (compensated,
    /// smallest terms first) with an Euler-Maclaurin integral tail bound
    /// (tail only valid at z = 1).
    fn polylog_oracle(s: f64, z: f64) -> f64 {
        let n = 200_000usize;
        let mut sum = 0.0;
        let mut comp = 0.0;
        for k in (1..=n).rev() {
            let term = z.powi(k as i32) / (k as f64).powf(s);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        if z == 1.0 {
            let nf = n as f64;
            sum += nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0;
        }
        sum
    }

    #[test]
    fn polylog_empty_series() {
        assert_eq!(polylog(1.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn polylog_li1_closed_form() {
        let v = polylog(1.0, 0.5).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn polylog_at_unit_fugacity_is_zeta() {
        // frozen from the summation oracle; equals zeta(3/2)
        let expect = 2.612_375_348_685_488_3;
        assert!((polylog_oracle(1.5, 1.0) - expect).abs() < 1e-12);
        assert!((polylog(1.5, 1.0).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn polylog_domain_errors() {
        assert!(matches!(polylog(1.5, -0.1), Err(Error::Domain(_))));
        assert!(matches!(polylog(1.5, 1.1), Err(Error::Domain(_))));
        assert!(matches!(polylog(1.0, 1.0), Err(Error::Divergent(_))));
        assert!(matches!(polylog(0.5, 1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn polylog_series_vs_expansion_overlap() {
        // The two evaluation branches must agree where both are usable.
        for &s in &[0.5, 1.5, 2.0, 2.5, 3.0] {
            for &z in &[0.991, 0.995, 0.9999] {
                let series = polylog_series(s, z);
                let expansion = polylog_near_unit(s, -(z as f64).ln());
                assert!(
                    rel_err(series, expansion) < 1e-11,
                    "s={s} z={z}: {series} vs {expansion}"
                );
            }
        }
    }

    #[test]
    fn polylog_monotone_in_fugacity() {
        for &s in &[0.5, 1.5, 2.5] {
            let mut prev = 0.0;
            for i in 1..=120 {
                let z = i as f64 / 121.0;
                let v = polylog(s, z).unwrap();
                assert!(v > prev, "Li_{s} not increasing at z={z}");
                prev = v;
            }
        }
    }

    #[test]
    fn pressure_at_mu0_is_zeta_5_2() {
        let (p, dos) = unit_lambda(3);
        let v = free_pressure(&p, &dos, 0.0).unwrap();
        assert!((v - 1.341_487_257_250_917_2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn density_at_mu0_is_zeta_3_2() {
        let (p, dos) = unit_lambda(3);
        let v = free_density(&p, &dos, 0.0).unwrap();
        assert!((v - 2.612_375_348_685_488_3).abs() < 1e-12, "{v}");
    }

    #[test]
    fn vacuum_limit() {
        let (p, dos) = unit_lambda(3);
        assert_eq!(free_pressure(&p, &dos, -800.0).unwrap(), 0.0);
        assert_eq!(free_density(&p, &dos, -800.0).unwrap(), 0.0);
    }

    #[test]
    fn d2_closed_form() {
        let (p, dos) = unit_lambda(2);
        let v = free_density(&p, &dos, -0.5).unwrap();
        let expect = -(1.0 - (-0.5f64).exp()).ln();
        assert!((v - expect).abs() < 1e-13);
    }

    #[test]
    fn density_divergence_low_dim() {
        for dim in [1, 2] {
            let (p, dos) = unit_lambda(dim);
            assert!(matches!(free_density(&p, &dos, 0.0), Err(Error::Divergent(_))));
            assert!(critical_density(&p, &dos).unwrap().is_infinite());
        }
    }

    #[test]
    fn critical_density_d3() {
        let (p, dos) = unit_lambda(3);
        let rc = critical_density(&p, &dos).unwrap().finite().unwrap();
        assert!((rc - 2.612_375_348_685_488_3).abs() < 1e-12);
    }

    #[test]
    fn mu_above_mu0_rejected() {
        let (p, dos) = unit_lambda(3);
        assert!(matches!(free_pressure(&p, &dos, 0.1), Err(Error::Domain(_))));
        assert!(matches!(
            free_pressure_quadrature(&p, &dos, 0.1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn closed_form_vs_quadrature_grid() {
        // Non-unit lambda and shifted mu0 to exercise all prefactors.
        for dim in [1u32, 2, 3] {
            let p = ThermoParams::new(1.3, 1.7, 0.8, dim, -0.2).unwrap();
            let dos = DensityOfStates::kinetic(&p);
            for i in 0..12 {
                let mu = p.mu0 - 3.0 + 2.99 * i as f64 / 11.0;
                let pc = free_pressure(&p, &dos, mu).unwrap();
                let pq = free_pressure_quadrature(&p, &dos, mu).unwrap();
                assert!(rel_err(pc, pq) < 1e-9, "d={dim} mu={mu}: {pc} vs {pq}");
                let rc = free_density(&p, &dos, mu).unwrap();
                let rq = free_density_quadrature(&p, &dos, mu).unwrap();
                assert!(rel_err(rc, rq) < 1e-9, "d={dim} mu={mu}: {rc} vs {rq}");
            }
        }
    }

    #[test]
    fn monotone_and_convex_in_mu() {
        let (p, dos) = unit_lambda(3);
        let n = 120;
        let mut prev_p = f64::NEG_INFINITY;
        let mut prev_r = f64::NEG_INFINITY;
        let mut values = Vec::new();
        for i in 0..n {
            let mu = -4.0 + 3.95 * i as f64 / (n - 1) as f64;
            let pr = free_pressure(&p, &dos, mu).unwrap();
            let rh = free_density(&p, &dos, mu).unwrap();
            assert!(pr > prev_p, "pressure not increasing at {mu}");
            assert!(rh > prev_r, "density not increasing at {mu}");
            prev_p = pr;
            prev_r = rh;
            values.push(pr);
        }
        for w in values.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] > -1e-12, "pressure not convex");
        }
    }

    #[test]
    fn pressure_derivative_is_density() {
        let (p, dos) = unit_lambda(3);
        let h = 1e-5;
        for &mu in &[-3.0, -1.5, -0.7, -0.2] {
            let dp = (free_pressure(&p, &dos, mu + h).unwrap()
                - free_pressure(&p, &dos, mu - h).unwrap())
                / (2.0 * h);
            let rho = free_density(&p, &dos, mu).unwrap();
            assert!(rel_err(dp, rho) < 1e-6, "mu={mu}: {dp} vs {rho}");
        }
    }

    #[test]
    fn lambda_cubed_scaling() {
        // rho0(mu0) * lambda^3 = zeta(3/2) independent of (beta, m)
        for &(beta, m) in &[(0.7, 3.0), (2.2, 0.9), (1.0, 5.5)] {
            let p = ThermoParams::new(beta, m, 1.0, 3, 0.4).unwrap();
            let dos = DensityOfStates::kinetic(&p);
            let rho = free_density(&p, &dos, p.mu0).unwrap();
            let lhs = rho * p.thermal_wavelength().powi(3);
            assert!((lhs - 2.612_375_348_685_488_3).abs() < 1e-11, "{lhs}");
        }
    }
}
