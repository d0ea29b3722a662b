//! Dielectric response on the imaginary frequency axis.
//!
//! Frequencies are carried as energies `ħξ` in eV, so integrals over the
//! imaginary axis come out directly in eV.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A material described only by `ε(iξ)`.
pub trait Dielectric: Send + Sync {
    /// Permittivity at imaginary frequency `xi` (eV), `xi > 0`.
    fn eps_imaginary(&self, xi: f64) -> Result<f64>;
}

/// Drude metal: `ε(iξ) = 1 + ωp² / (ξ (ξ + γ))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrudeModel {
    plasma_energy: f64,
    damping_energy: f64,
}

impl DrudeModel {
    pub const GOLD_PLASMA_ENERGY_EV: f64 = 9.0;
    pub const GOLD_DAMPING_ENERGY_EV: f64 = 0.035;

    pub fn new(plasma_energy: f64, damping_energy: f64) -> Result<Self> {
        if !(plasma_energy.is_finite() && plasma_energy > 0.0) {
            return Err(Error::Domain(format!(
                "plasma energy must be positive, got {plasma_energy}"
            )));
        }
        if !(damping_energy.is_finite() && damping_energy >= 0.0) {
            return Err(Error::Domain(format!(
                "damping energy must be non-negative, got {damping_energy}"
            )));
        }
        Ok(Self {
            plasma_energy,
            damping_energy,
        })
    }

    pub fn gold() -> Self {
        Self {
            plasma_energy: Self::GOLD_PLASMA_ENERGY_EV,
            damping_energy: Self::GOLD_DAMPING_ENERGY_EV,
        }
    }

    pub fn plasma_energy(&self) -> f64 {
        self.plasma_energy
    }

    pub fn damping_energy(&self) -> f64 {
        self.damping_energy
    }
}

impl Default for DrudeModel {
    fn default() -> Self {
        Self::gold()
    }
}

impl Dielectric for DrudeModel {
    fn eps_imaginary(&self, xi: f64) -> Result<f64> {
        eps_imaginary(self, xi)
    }
}

/// Frequency-independent permittivity, mostly useful for checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantDielectric(pub f64);

impl Dielectric for ConstantDielectric {
    fn eps_imaginary(&self, xi: f64) -> Result<f64> {
        check_frequency(xi)?;
        Ok(self.0)
    }
}

fn check_frequency(xi: f64) -> Result<()> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(Error::Domain(format!(
            "imaginary frequency must be positive, got {xi} eV"
        )));
    }
    Ok(())
}

pub fn eps_imaginary(model: &DrudeModel, xi: f64) -> Result<f64> {
    check_frequency(xi)?;
    let wp = model.plasma_energy;
    Ok(1.0 + wp * wp / (xi * (xi + model.damping_energy)))
}

/// Diagonal collocation coefficient `λ = 2π (ε + 1) / (ε − 1)`.
pub fn lambda_of_eps(eps: f64) -> Result<f64> {
    if eps == 1.0 {
        return Err(Error::SingularMaterial(
            "ε = 1 has no response (λ diverges)".into(),
        ));
    }
    if eps.is_infinite() {
        return Ok(2.0 * PI);
    }
    Ok(2.0 * PI * (eps + 1.0) / (eps - 1.0))
}

/// Non-retarded half-space reflection coefficient `(ε − 1) / (ε + 1)`.
pub fn half_space_reflection(eps: f64) -> Result<f64> {
    if eps == -1.0 {
        return Err(Error::SingularMaterial(
            "ε = −1 is the planar surface-plasmon pole".into(),
        ));
    }
    if eps.is_infinite() {
        return Ok(1.0);
    }
    Ok((eps - 1.0) / (eps + 1.0))
}
