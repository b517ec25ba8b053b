//! Constitutive closures for crystalline RDX.
//!
//! Every function here is a pure evaluation on an immutable [`MaterialModel`]:
//! the Birch–Murnaghan cold curve, the density-dependent Grüneisen
//! coefficient, the pressure/temperature dependent shear modulus, the melt
//! curve, Johnson–Cook flow stress, the Mie–Grüneisen pressure and the
//! calorific temperature law.
//!
//! The reference density `rho0` and the Taylor–Quinney fraction `beta` are
//! not part of the published property table; their defaults (1800 kg/m³ and
//! 0.9) are conventions and can be overridden from the run configuration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("{what} must be finite and positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("{what} must be finite and non-negative, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("invalid material parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

/// Lower bound on the melt-curve bracket `1 + (p - p_ref)/a` under deep tension.
pub const MELT_BRACKET_FLOOR: f64 = 1e-6;

/// Complete parameter set of the continuum RDX model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialModel {
    /// Reference density, kg/m³.
    pub rho0: f64,
    /// Bulk modulus, Pa.
    pub k0: f64,
    /// Pressure derivative of the bulk modulus.
    pub k0_prime: f64,
    /// Reference shear modulus, Pa.
    pub g0: f64,
    /// Pressure coefficient of the shear modulus.
    pub a1: f64,
    /// Temperature coefficient of the shear modulus, Pa/K.
    pub a2: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Johnson–Cook yield constant, Pa.
    pub jc_a: f64,
    /// Johnson–Cook hardening modulus, Pa.
    pub jc_b: f64,
    pub jc_n: f64,
    pub jc_m: f64,
    pub jc_c: f64,
    /// Johnson–Cook reference strain rate, 1/s.
    pub epsdot0: f64,
    /// Johnson–Cook reference temperature, K.
    pub t_ref: f64,
    /// Melt temperature at `p_ref`, K.
    pub t_melt_ref: f64,
    /// Melt-curve reference pressure, Pa.
    pub p_ref: f64,
    /// Melt-curve pressure scale, Pa.
    pub a_melt: f64,
    pub c_melt: f64,
    /// Isochoric specific heat, J/(kg K).
    pub cv: f64,
    /// Thermal conductivity, W/(m K).
    pub chi: f64,
    /// Reference temperature of the calorific law, K.
    pub t0: f64,
    /// Reference specific internal energy, J/kg.
    pub e0: f64,
    /// Taylor–Quinney fraction of plastic work converted to heat.
    pub beta: f64,
    /// Shear modulus floor as a fraction of `g0`.
    pub g_min_fraction: f64,
}

impl Default for MaterialModel {
    fn default() -> Self {
        Self::rdx_table1()
    }
}

impl MaterialModel {
    /// RDX property set with the tabulated constants as literal decimals.
    pub fn rdx_table1() -> Self {
        Self {
            rho0: 1800.0,
            k0: 13e9,
            k0_prime: 9.2,
            g0: 5.314e9,
            a1: 3.3774,
            a2: -10.356e6,
            gamma0: 0.667,
            gamma1: 2.00878,
            gamma2: -0.805669,
            jc_a: 0.3e9,
            jc_b: 0.1e9,
            jc_n: 0.1,
            jc_m: 3.0,
            jc_c: 1.8,
            epsdot0: 4.36e4,
            t_ref: 298.0,
            t_melt_ref: 478.0,
            p_ref: 0.0001e9,
            a_melt: 0.9631e9,
            c_melt: 2.8855,
            cv: 1980.0,
            chi: 0.178,
            t0: 298.0,
            e0: 0.0,
            beta: 0.9,
            g_min_fraction: 0.01,
        }
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        let fields = [
            ("rho0", self.rho0),
            ("k0", self.k0),
            ("k0_prime", self.k0_prime),
            ("g0", self.g0),
            ("a1", self.a1),
            ("a2", self.a2),
            ("gamma0", self.gamma0),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("jc_a", self.jc_a),
            ("jc_b", self.jc_b),
            ("jc_n", self.jc_n),
            ("jc_m", self.jc_m),
            ("jc_c", self.jc_c),
            ("epsdot0", self.epsdot0),
            ("t_ref", self.t_ref),
            ("t_melt_ref", self.t_melt_ref),
            ("p_ref", self.p_ref),
            ("a_melt", self.a_melt),
            ("c_melt", self.c_melt),
            ("cv", self.cv),
            ("chi", self.chi),
            ("t0", self.t0),
            ("e0", self.e0),
            ("beta", self.beta),
            ("g_min_fraction", self.g_min_fraction),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(MaterialError::InvalidParameter { name, reason: format!("{value} is not finite") });
            }
        }
        let positive = [
            ("rho0", self.rho0),
            ("k0", self.k0),
            ("g0", self.g0),
            ("cv", self.cv),
            ("epsdot0", self.epsdot0),
            ("t_melt_ref", self.t_melt_ref),
            ("a_melt", self.a_melt),
            ("c_melt", self.c_melt),
            ("g_min_fraction", self.g_min_fraction),
        ];
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(MaterialError::InvalidParameter { name, reason: format!("{value} must be > 0") });
            }
        }
        if self.chi < 0.0 {
            return Err(MaterialError::InvalidParameter { name: "chi", reason: "must be >= 0".into() });
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(MaterialError::InvalidParameter { name: "beta", reason: "must lie in [0, 1]".into() });
        }
        Ok(())
    }

    /// Third-order Birch–Murnaghan cold (0 K) pressure, Pa.
    pub fn cold_pressure(&self, rho: f64) -> Result<f64, MaterialError> {
        check_density(rho)?;
        Ok(self.cold_pressure_raw(rho))
    }

    #[inline]
    pub(crate) fn cold_pressure_raw(&self, rho: f64) -> f64 {
        let x = rho / self.rho0;
        let x13 = x.cbrt();
        let x23 = x13 * x13;
        let x53 = x * x23;
        let x73 = x53 * x23;
        1.5 * self.k0 * (x73 - x53) * (1.0 + 0.75 * (self.k0_prime - 4.0) * (x23 - 1.0))
    }

    /// Analytic `dp_c/dρ`, Pa·m³/kg.
    pub fn cold_pressure_derivative(&self, rho: f64) -> Result<f64, MaterialError> {
        check_density(rho)?;
        Ok(self.cold_pressure_derivative_raw(rho))
    }

    #[inline]
    pub(crate) fn cold_pressure_derivative_raw(&self, rho: f64) -> f64 {
        let x = rho / self.rho0;
        let x13 = x.cbrt();
        let x23 = x13 * x13;
        let x43 = x * x13;
        let x53 = x * x23;
        let x73 = x53 * x23;
        let f1 = x73 - x53;
        let df1 = (7.0 / 3.0) * x43 - (5.0 / 3.0) * x23;
        let f2 = 1.0 + 0.75 * (self.k0_prime - 4.0) * (x23 - 1.0);
        let df2 = 0.5 * (self.k0_prime - 4.0) / x13;
        1.5 * self.k0 * (df1 * f2 + f1 * df2) / self.rho0
    }

    /// Grüneisen coefficient `Γ(ρ) = Γ₀ + γ₁(ρ₀/ρ) + γ₂(ρ₀/ρ)²`.
    pub fn gruneisen(&self, rho: f64) -> Result<f64, MaterialError> {
        check_density(rho)?;
        Ok(self.gruneisen_raw(rho))
    }

    #[inline]
    pub(crate) fn gruneisen_raw(&self, rho: f64) -> f64 {
        let r = self.rho0 / rho;
        self.gamma0 + self.gamma1 * r + self.gamma2 * r * r
    }

    #[inline]
    pub(crate) fn gruneisen_derivative_raw(&self, rho: f64) -> f64 {
        let r = self.rho0 / rho;
        -(self.gamma1 * r + 2.0 * self.gamma2 * r * r) / rho
    }

    /// Lower clamp of the shear modulus, Pa.
    pub fn shear_modulus_floor(&self) -> f64 {
        self.g_min_fraction * self.g0
    }

    /// `G(p, T) = G₀ + a₁p + a₂(T − T₀)`, clamped below at [`Self::shear_modulus_floor`].
    pub fn shear_modulus(&self, p: f64, temperature: f64) -> f64 {
        let g = self.g0 + self.a1 * p + self.a2 * (temperature - self.t0);
        // NaN inputs fall through to the floor as well
        if g > self.shear_modulus_floor() {
            g
        } else {
            self.shear_modulus_floor()
        }
    }

    /// Pressure-dependent melt temperature, K.
    pub fn melt_temperature(&self, p: f64) -> f64 {
        let bracket = (1.0 + (p - self.p_ref) / self.a_melt).max(MELT_BRACKET_FLOOR);
        self.t_melt_ref * bracket.powf(1.0 / self.c_melt)
    }

    /// Johnson–Cook flow stress, Pa.
    ///
    /// The rate bracket is held at 1 below the reference rate and the thermal
    /// term uses the pressure-dependent melt temperature. Returns 0 at or above
    /// melt.
    pub fn yield_stress_jc(&self, eps_pl: f64, epsdot: f64, temperature: f64, p: f64) -> Result<f64, MaterialError> {
        if !(eps_pl >= 0.0) || !eps_pl.is_finite() {
            return Err(MaterialError::Negative { what: "plastic strain", value: eps_pl });
        }
        if !(epsdot >= 0.0) || !epsdot.is_finite() {
            return Err(MaterialError::Negative { what: "plastic strain rate", value: epsdot });
        }
        if !temperature.is_finite() {
            return Err(MaterialError::NonFinite { what: "temperature", value: temperature });
        }
        if !p.is_finite() {
            return Err(MaterialError::NonFinite { what: "pressure", value: p });
        }
        Ok(self.yield_stress_raw(eps_pl, epsdot, temperature, p))
    }

    #[inline]
    pub(crate) fn yield_stress_raw(&self, eps_pl: f64, epsdot: f64, temperature: f64, p: f64) -> f64 {
        let t_melt = self.melt_temperature(p);
        if temperature >= t_melt {
            return 0.0;
        }
        let hardening = self.jc_a + self.jc_b * eps_pl.powf(self.jc_n);
        let rate = if epsdot > self.epsdot0 {
            1.0 + self.jc_c * (epsdot / self.epsdot0).ln()
        } else {
            1.0
        };
        let theta = ((temperature - self.t_ref) / (t_melt - self.t_ref)).clamp(0.0, 1.0);
        let thermal = if theta > 0.0 { 1.0 - theta.powf(self.jc_m) } else { 1.0 };
        (hardening * rate * thermal).max(0.0)
    }

    /// Mie–Grüneisen pressure `p = p_c(ρ) + Γ(ρ)ρ(e − e_c)`.
    pub fn pressure_mie_gruneisen(&self, rho: f64, e: f64, e_cold: f64) -> Result<f64, MaterialError> {
        check_density(rho)?;
        if !e.is_finite() {
            return Err(MaterialError::NonFinite { what: "specific energy", value: e });
        }
        if !e_cold.is_finite() {
            return Err(MaterialError::NonFinite { what: "cold energy", value: e_cold });
        }
        Ok(self.pressure_raw(rho, e, e_cold))
    }

    #[inline]
    pub(crate) fn pressure_raw(&self, rho: f64, e: f64, e_cold: f64) -> f64 {
        self.cold_pressure_raw(rho) + self.gruneisen_raw(rho) * rho * (e - e_cold)
    }

    /// Hydrodynamic cold energy `e₀ + ∫_{ρ₀}^{ρ} p_c(ρ')/ρ'² dρ'` by adaptive
    /// quadrature. The solver uses [`ColdEnergyTable`] instead.
    pub fn cold_energy_hydro(&self, rho: f64) -> Result<f64, MaterialError> {
        check_density(rho)?;
        Ok(self.e0 + self.cold_energy_integral(self.rho0, rho))
    }

    fn cold_energy_integral(&self, from: f64, to: f64) -> f64 {
        let f = |r: f64| self.cold_pressure_raw(r) / (r * r);
        adaptive_simpson(&f, from, to, 1e-13)
    }

    /// Calorific law `T = T₀ + (e − e_c)/c_v`.
    #[inline]
    pub fn temperature_from_state(&self, e: f64, e_cold: f64) -> f64 {
        self.t0 + (e - e_cold) / self.cv
    }

    /// Specific energy that yields `temperature` at cold energy `e_cold`.
    #[inline]
    pub fn energy_for_temperature(&self, temperature: f64, e_cold: f64) -> f64 {
        e_cold + self.cv * (temperature - self.t0)
    }

    /// Longitudinal wave speed from the cold curve plus shear stiffness,
    /// `sqrt(max(0, dp_c/dρ) + 4G/(3ρ))`.
    pub fn bulk_sound_speed(&self, rho: f64, shear_modulus: f64) -> Result<f64, MaterialError> {
        check_density(rho)?;
        Ok(self.bulk_sound_speed_raw(rho, shear_modulus))
    }

    #[inline]
    pub(crate) fn bulk_sound_speed_raw(&self, rho: f64, shear_modulus: f64) -> f64 {
        (self.cold_pressure_derivative_raw(rho).max(0.0) + (4.0 / 3.0) * shear_modulus.max(0.0) / rho).sqrt()
    }

    /// Isentropic sound speed of the full Mie–Grüneisen surface plus shear
    /// stiffness. Never below [`Self::bulk_sound_speed`].
    #[inline]
    pub fn sound_speed(&self, rho: f64, e: f64, e_cold: f64, p: f64, shear_modulus: f64) -> f64 {
        let gamma = self.gruneisen_raw(rho);
        let thermal = e - e_cold;
        // (∂p/∂ρ)_e + (p/ρ²)(∂p/∂e)_ρ with de_c/dρ = p_c/ρ²
        let dpdrho_e = self.cold_pressure_derivative_raw(rho)
            + (gamma + rho * self.gruneisen_derivative_raw(rho)) * thermal
            - gamma * self.cold_pressure_raw(rho) / rho;
        let c2 = dpdrho_e + p * gamma / rho;
        let shear = (4.0 / 3.0) * shear_modulus.max(0.0) / rho;
        let bulk = self.cold_pressure_derivative_raw(rho).max(0.0);
        (c2.max(bulk) + shear).sqrt()
    }

    /// Plastic work fraction stored as cold energy.
    #[inline]
    pub fn stored_work_fraction(&self) -> f64 {
        1.0 - self.beta
    }
}

fn check_density(rho: f64) -> Result<(), MaterialError> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(MaterialError::NonPositive { what: "density", value: rho })
    }
}

/// Adaptive Simpson quadrature to relative tolerance `rel_tol`.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = (rel_tol * whole.abs()).max(f64::MIN_POSITIVE);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Dense lookup of the hydrodynamic cold energy for the solver hot loop.
///
/// Nodes are log-spaced in `ρ/ρ₀` over `[0.5, 3]` with `ρ₀` itself as a node;
/// between nodes a cubic Hermite interpolant uses the exact slope
/// `p_c(ρ)/ρ²`. Densities outside the table fall back to direct quadrature.
#[derive(Debug, Clone)]
pub struct ColdEnergyTable {
    model: MaterialModel,
    log_min: f64,
    step: f64,
    rho: Vec<f64>,
    energy: Vec<f64>,
    slope: Vec<f64>,
}

impl ColdEnergyTable {
    pub const NODES: usize = 4096;
    pub const RATIO_MIN: f64 = 0.5;
    pub const RATIO_MAX: f64 = 3.0;

    pub fn new(model: &MaterialModel) -> Self {
        let step = (Self::RATIO_MAX / Self::RATIO_MIN).ln() / (Self::NODES - 1) as f64;
        // shift the grid so that k = 0 lands on rho0 exactly
        let k_min = (Self::RATIO_MIN.ln() / step).floor() as i64;
        let k_max = k_min + Self::NODES as i64 - 1;
        let log_min = k_min as f64 * step;
        let ks: Vec<i64> = (k_min..=k_max).collect();
        let rho: Vec<f64> = ks
            .iter()
            .map(|&k| if k == 0 { model.rho0 } else { model.rho0 * (k as f64 * step).exp() })
            .collect();
        let zero = ks.iter().position(|&k| k == 0).expect("reference density is a node");

        let mut energy = vec![0.0; rho.len()];
        energy[zero] = model.e0;
        for i in zero + 1..rho.len() {
            energy[i] = energy[i - 1] + model.cold_energy_integral(rho[i - 1], rho[i]);
        }
        for i in (0..zero).rev() {
            energy[i] = energy[i + 1] + model.cold_energy_integral(rho[i + 1], rho[i]);
        }
        let slope = rho.iter().map(|&r| model.cold_pressure_raw(r) / (r * r)).collect();
        Self { model: *model, log_min, step, rho, energy, slope }
    }

    pub fn model(&self) -> &MaterialModel {
        &self.model
    }

    /// Density range covered by the table, kg/m³.
    pub fn range(&self) -> (f64, f64) {
        (self.rho[0], self.rho[self.rho.len() - 1])
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let (lo, hi) = self.range();
        if !(rho >= lo && rho <= hi) {
            if rho > 0.0 && rho.is_finite() {
                // anchor at the nearest table end to keep the quadrature short
                let (anchor, base) = if rho > hi { (hi, self.energy[self.rho.len() - 1]) } else { (lo, self.energy[0]) };
                return base + self.model.cold_energy_integral(anchor, rho);
            }
            return f64::NAN;
        }
        let pos = ((rho / self.model.rho0).ln() - self.log_min) / self.step;
        let mut i = (pos.floor() as usize).min(self.rho.len() - 2);
        // rounding in ln() can place rho one cell off
        if rho < self.rho[i] && i > 0 {
            i -= 1;
        } else if rho > self.rho[i + 1] && i + 2 < self.rho.len() {
            i += 1;
        }
        let (r0, r1) = (self.rho[i], self.rho[i + 1]);
        if rho == r0 {
            return self.energy[i];
        }
        let h = r1 - r0;
        let t = (rho - r0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.energy[i] + h10 * h * self.slope[i] + h01 * self.energy[i + 1] + h11 * h * self.slope[i + 1]
    }
}
