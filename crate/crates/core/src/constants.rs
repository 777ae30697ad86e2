//! Physical constants (CODATA 2018), unit conversions and the Matsubara
//! frequency grid.
//!
//! Everything in this crate works in SI units. The only conversion that
//! crosses the boundary is photon energy to angular frequency, see
//! [`ev_to_angular_frequency`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;
/// Elementary charge, C (exact). Used only for eV conversions.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// The constants entering the pressure formulas, bundled for callers that
/// want to record them alongside results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub boltzmann_constant: f64,
    pub reduced_planck_constant: f64,
    pub speed_of_light: f64,
    pub vacuum_permittivity: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        boltzmann_constant: BOLTZMANN,
        reduced_planck_constant: HBAR,
        speed_of_light: SPEED_OF_LIGHT,
        vacuum_permittivity: VACUUM_PERMITTIVITY,
    };
}

/// Photon energy in eV to angular frequency in rad/s (ω = E/ħ).
pub fn ev_to_angular_frequency(energy_ev: f64) -> f64 {
    energy_ev * ELEMENTARY_CHARGE / HBAR
}

/// Angular frequency in rad/s to photon energy in eV.
pub fn angular_frequency_to_ev(omega: f64) -> f64 {
    omega * HBAR / ELEMENTARY_CHARGE
}

// 2π k_B / ħ, so that ξ_l = l · (T · MATSUBARA_SCALE).
const MATSUBARA_SCALE: f64 = 2.0 * PI * BOLTZMANN / HBAR;

/// First Matsubara frequency 2π k_B T / ħ.
fn fundamental(temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::domain(
            "temperature",
            temperature,
            "must be positive and finite",
        ));
    }
    Ok(temperature * MATSUBARA_SCALE)
}

/// Matsubara frequency ξ_l = 2π k_B T l / ħ in rad/s.
pub fn matsubara_frequency(l: u64, temperature: f64) -> Result<f64> {
    Ok(l as f64 * fundamental(temperature)?)
}

/// The Matsubara frequencies ξ_0 … ξ_lmax at a fixed temperature.
///
/// The l = 0 term of the Lifshitz sum carries weight 1/2; [`weight`](Self::weight)
/// returns it so callers do not special-case the index themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct MatsubaraGrid {
    temperature: f64,
    frequencies: Vec<f64>,
}

impl MatsubaraGrid {
    pub fn new(temperature: f64, max_index: usize) -> Result<Self> {
        let step = fundamental(temperature)?;
        let frequencies = (0..=max_index).map(|l| l as f64 * step).collect();
        Ok(Self {
            temperature,
            frequencies,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Always true: the zero-frequency term is halved.
    pub fn half_weight_zero_term(&self) -> bool {
        true
    }

    pub fn weight(&self, l: usize) -> f64 {
        if l == 0 {
            0.5
        } else {
            1.0
        }
    }
}
