//! Superheated liquid helium: physical inputs, derived scales and the
//! potential curves of the effective bubble Hamiltonian.

use serde::Serialize;

use crate::parser::params::ParamsError;
use crate::susy::{effective_hamiltonian_z, EffectiveHamiltonianZ, PartnerSource, SusyError};
use crate::symbolic::OrderingParam;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Helium-4 atomic mass, kg.
pub const HELIUM4_MASS: f64 = 6.6465e-27;
/// Joules per electron-volt.
pub const JOULES_PER_EV: f64 = 1.602_176_634e-19;

pub fn joules_to_ev(e: f64) -> f64 {
    e / JOULES_PER_EV
}

/// Inputs in SI units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalParams {
    /// Surface tension, N/m.
    pub sigma: f64,
    /// Equilibrium vapour pressure, Pa.
    #[serde(rename = "P_v")]
    pub p_v: f64,
    /// Liquid density, kg/m³.
    #[serde(rename = "rho_L")]
    pub rho_l: f64,
    /// Vapour density, kg/m³.
    pub rho_v: f64,
    /// Applied pressure, Pa.
    #[serde(rename = "P")]
    pub p: f64,
    /// Temperature, K.
    #[serde(rename = "T")]
    pub t: f64,
}

impl PhysicalParams {
    /// Superfluid helium at 4 K under zero applied pressure.
    pub fn helium4() -> Self {
        Self { sigma: 0.12e-3, p_v: 8.1445e4, rho_l: 140.0, rho_v: 0.0, p: 0.0, t: 4.0 }
    }

    /// Same liquid at applied pressure `ratio · P_v`.
    pub fn at_pressure_ratio(&self, ratio: f64) -> Self {
        Self { p: ratio * self.p_v, ..*self }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ParamsError::Invalid { key, reason: format!("must be positive, got {v}") })
            }
        };
        positive("sigma", self.sigma)?;
        positive("rho_L", self.rho_l)?;
        positive("T", self.t)?;
        if !(self.rho_v >= 0.0 && self.rho_v < self.rho_l) {
            return Err(ParamsError::Invalid {
                key: "rho_v",
                reason: format!("must satisfy 0 <= rho_v < rho_L, got {}", self.rho_v),
            });
        }
        if !self.p_v.is_finite() || !self.p.is_finite() {
            return Err(ParamsError::Invalid { key: "P", reason: "pressures must be finite".into() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeliumError {
    #[error("no critical radius: applied pressure {p} Pa is not below the vapour pressure {p_v} Pa")]
    NoCriticalRadius { p: f64, p_v: f64 },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Susy(#[from] SusyError),
}

/// Scales derived from [`PhysicalParams`], SI units throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Critical radius 2σ/(P_v − P), m.
    #[serde(rename = "R_c")]
    pub r_c: f64,
    /// Potential scale 4πσR_c², J.
    #[serde(rename = "U0")]
    pub u0: f64,
    /// Mass scale 4π(1 − ρ_v/ρ_L)²ρ_L R_c³, kg.
    #[serde(rename = "M0")]
    pub m0: f64,
    /// Kinetic prefactor ħ²/(2M₀R_c²), J.
    pub k: f64,
    /// Thermal de Broglie wavelength of one helium atom, m.
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    /// Thermal momentum h/Λ, kg·m/s.
    #[serde(rename = "p_Th")]
    pub p_th: f64,
    /// Pressure inside a bubble of radius R_c, Pa.
    #[serde(rename = "P_i_at_Rc")]
    pub p_i_at_rc: f64,
}

impl DerivedParams {
    /// √(U₀M₀), the momentum scale compared against p_Th.
    pub fn sqrt_u0_m0(&self) -> f64 {
        (self.u0 * self.m0).sqrt()
    }
}

pub fn critical_radius(p: &PhysicalParams) -> Result<f64, HeliumError> {
    if !(p.p < p.p_v) {
        return Err(HeliumError::NoCriticalRadius { p: p.p, p_v: p.p_v });
    }
    Ok(2.0 * p.sigma / (p.p_v - p.p))
}

pub fn derived_params(p: &PhysicalParams) -> Result<DerivedParams, HeliumError> {
    p.validate()?;
    let r_c = critical_radius(p)?;
    let four_pi = 4.0 * std::f64::consts::PI;
    let u0 = four_pi * p.sigma * r_c * r_c;
    let depletion = 1.0 - p.rho_v / p.rho_l;
    let m0 = four_pi * depletion * depletion * p.rho_l * r_c.powi(3);
    let k = HBAR * HBAR / (2.0 * m0 * r_c * r_c);
    let lambda = PLANCK / (2.0 * std::f64::consts::PI * HELIUM4_MASS * BOLTZMANN * p.t).sqrt();
    let p_th = PLANCK / lambda;
    let p_i_at_rc = p.p + 2.0 * p.sigma / r_c;
    Ok(DerivedParams { r_c, u0, m0, k, lambda, p_th, p_i_at_rc })
}

/// One row of a potential curve; energies in joules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub z: f64,
    pub v_a: f64,
    pub v_sys: f64,
    pub v_total: f64,
}

impl ProfilePoint {
    pub fn in_ev(&self) -> (f64, f64, f64) {
        (joules_to_ev(self.v_a), joules_to_ev(self.v_sys), joules_to_ev(self.v_total))
    }
}

/// Samples V_a, V_sys and their sum at each z (all z must be positive).
pub fn potential_profile(
    ord: &OrderingParam,
    params: &DerivedParams,
    zs: &[f64],
    source: PartnerSource,
    c0: f64,
) -> Result<Vec<ProfilePoint>, HeliumError> {
    let h = effective_hamiltonian_z(ord, params, source, c0)?;
    Ok(profile_of(&h, zs))
}

pub fn profile_of(h: &EffectiveHamiltonianZ, zs: &[f64]) -> Vec<ProfilePoint> {
    zs.iter()
        .map(|&z| {
            let v_a = h.v_a(z);
            let v_sys = h.v_sys(z);
            ProfilePoint { z, v_a, v_sys, v_total: v_a + v_sys }
        })
        .collect()
}

/// Stationary point of V_sys alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Barrier {
    pub z_star: f64,
    /// V_sys(z*) including the constant offset, J.
    pub v_star: f64,
}

/// z* = (2/3)^{5/2}, V* = (4/27)·U₀ + c₀.
pub fn barrier_info(params: &DerivedParams, c0: f64) -> Barrier {
    Barrier { z_star: (2.0f64 / 3.0).powf(2.5), v_star: 4.0 / 27.0 * params.u0 + c0 }
}
