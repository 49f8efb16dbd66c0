//! Units, physical constants, Rabi-frequency algebra and blockade radii.
//!
//! Frequencies are angular (rad/s) everywhere inside the crate. Values quoted
//! in Hz at the boundary are read as `Ω/2π` and converted with
//! [`hz_to_angular`]. The interaction coefficient `C₆` is stored as a positive
//! repulsive magnitude in J·m⁶; a negative literature value is accepted by
//! [`convert_c6_atomic_units`] and its sign dropped, since only `|C₆|` enters
//! the blockade condition.
//!
//! Reading quoted frequencies as `Ω/2π` rather than `Ω` raises `ħΩ₀` by 2π and
//! therefore shrinks every blockade radius by `(2π)^{1/6} ≈ 1.36`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 values.
pub mod constants {
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Bohr radius, m.
    pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
    /// Hartree energy, J.
    pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
}

/// The constant set used for unit conversion, gathered in one value so it can
/// be echoed into run manifests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub bohr_radius: f64,
    pub hartree: f64,
}

pub const CODATA_2018: Constants = Constants {
    hbar: constants::HBAR,
    bohr_radius: constants::BOHR_RADIUS,
    hartree: constants::HARTREE,
};

impl Constants {
    /// One atomic unit of `C₆` (`E_h·a₀⁶`) in J·m⁶.
    pub fn c6_atomic_unit(&self) -> f64 {
        self.hartree * self.bohr_radius.powi(6)
    }
}

pub fn hz_to_angular(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}

pub fn angular_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Volume of a sphere of the given radius.
pub fn sphere_volume(radius: f64) -> f64 {
    4.0 * PI / 3.0 * radius.powi(3)
}

/// Laser and interaction parameters of the effective two-level model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Single-atom Rabi frequency Ω₀, rad/s.
    pub omega0: f64,
    /// Repulsive van der Waals magnitude, J·m⁶.
    pub c6: f64,
    /// Uniform dephasing rate, 1/s.
    pub gamma_dephase: f64,
    /// Geometric factor multiplying every blockade radius.
    pub kappa: f64,
}

impl PhysicalParams {
    pub fn new(omega0: f64, c6: f64) -> Result<Self> {
        let p = PhysicalParams {
            omega0,
            c6,
            gamma_dephase: 0.0,
            kappa: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_gamma(mut self, gamma_dephase: f64) -> Result<Self> {
        self.gamma_dephase = gamma_dephase;
        self.validate()?;
        Ok(self)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        self.kappa = kappa;
        self.validate()?;
        Ok(self)
    }

    pub fn with_omega0(mut self, omega0: f64) -> Result<Self> {
        self.omega0 = omega0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega0", self.omega0)?;
        positive("c6", self.c6)?;
        positive("kappa", self.kappa)?;
        if !(self.gamma_dephase.is_finite() && self.gamma_dephase >= 0.0) {
            return Err(Error::invalid("gamma_dephase", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// `C₆/(ħΩ₀)` in m⁶.
    fn blockade_volume_sq(&self) -> f64 {
        self.c6 / (constants::HBAR * self.omega0)
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// Rabi frequencies of the two legs of the ladder and the detuning from the
/// intermediate level, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonInputs {
    pub omega1: f64,
    pub omega2: f64,
    pub delta: f64,
}

/// Effective two-level Rabi frequency `Ω₁Ω₂/(2Δ)` of a far-detuned ladder.
pub fn two_photon_rabi(inputs: TwoPhotonInputs) -> Result<f64> {
    let TwoPhotonInputs {
        omega1,
        omega2,
        delta,
    } = inputs;
    for (name, v) in [("omega1", omega1), ("omega2", omega2)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
        }
    }
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite and nonzero"));
    }
    Ok(omega1 * omega2 / (2.0 * delta))
}

/// Convert a `C₆` coefficient in atomic units to a repulsive magnitude in J·m⁶.
pub fn convert_c6_atomic_units(c6_au: f64) -> Result<f64> {
    if c6_au == 0.0 || !c6_au.is_finite() {
        return Err(Error::invalid("c6_au", "must be finite and nonzero"));
    }
    Ok(c6_au.abs() * CODATA_2018.c6_atomic_unit())
}

/// Distance at which `C₆/r⁶` equals the power-broadened linewidth `ħΩ₀`,
/// scaled by the geometric factor κ.
pub fn blockade_radius_simple(params: &PhysicalParams) -> f64 {
    params.kappa * params.blockade_volume_sq().powf(1.0 / 6.0)
}

/// Blockade radius and enclosed atom number at a local density when the
/// linewidth is the collective one, `ħ√N·Ω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveBlockade {
    /// κ times the self-consistent radius, m.
    pub radius: f64,
    /// Atoms inside the blockade sphere of `radius`.
    pub n_atoms: f64,
}

/// Solve `C₆/r⁶ = ħ√N·Ω₀` with `N = n·(4π/3)r³` in closed form:
/// `r = [C₆/(ħΩ₀)]^{2/15}·(4πn/3)^{−1/15}`; κ scales the returned radius
/// before `N` is evaluated.
pub fn blockade_radius_collective(
    params: &PhysicalParams,
    local_density: f64,
) -> Result<CollectiveBlockade> {
    positive("local_density", local_density)?;
    let base = params.blockade_volume_sq().powf(2.0 / 15.0)
        * (4.0 * PI * local_density / 3.0).powf(-1.0 / 15.0);
    let radius = params.kappa * base;
    Ok(CollectiveBlockade {
        radius,
        n_atoms: local_density * sphere_volume(radius),
    })
}

/// Relative residual of `C₆/r⁶ = ħ√N·Ω₀` at radius `r` and density `n`.
pub fn collective_residual(params: &PhysicalParams, radius: f64, local_density: f64) -> f64 {
    let n_atoms = local_density * sphere_volume(radius);
    let lhs = params.c6 / radius.powi(6);
    let rhs = constants::HBAR * n_atoms.sqrt() * params.omega0;
    (lhs - rhs).abs() / rhs
}
