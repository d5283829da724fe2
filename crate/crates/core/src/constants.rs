//! Physical constants in SI units.
//!
//! Every other module reads ħ, k_B, c and ζ(3) from here. Frequencies are
//! angular (rad/s), lengths in metres, pressures in pascal.

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Speed of light in vacuum, m/s.
pub const C: f64 = 2.997_924_58e8;

/// Apéry's constant ζ(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// The three fundamental constants as one value, for callers that want to
/// carry them around or print them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        k_b: K_B,
        c: C,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

/// k_B·T in joules.
pub fn thermal_energy(temperature: f64) -> Result<f64> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::domain(format!(
            "temperature must be finite and positive, got {temperature}"
        )));
    }
    Ok(K_B * temperature)
}
