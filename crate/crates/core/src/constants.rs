//! CODATA 2018 values, SI units.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Elementary charge, C.
    pub e: f64,
    /// Vacuum permittivity, F/m.
    pub epsilon0: f64,
    /// Atomic mass unit, kg.
    pub amu: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    e: 1.602_176_634e-19,
    epsilon0: 8.854_187_812_8e-12,
    amu: 1.660_539_066_60e-27,
};

pub const HBAR: f64 = CONSTANTS.hbar;
pub const C: f64 = CONSTANTS.c;
pub const E_CHARGE: f64 = CONSTANTS.e;
pub const EPSILON0: f64 = CONSTANTS.epsilon0;
pub const AMU: f64 = CONSTANTS.amu;

/// Vacuum wavelength (m) to angular frequency (rad/s).
pub fn omega_from_wavelength(wavelength: f64) -> f64 {
    2.0 * PI * C / wavelength
}

/// Angular frequency (rad/s) to vacuum wavelength (m).
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * C / omega
}

/// Ordinary frequency (Hz) to angular frequency (rad/s).
pub fn angular(freq_hz: f64) -> f64 {
    2.0 * PI * freq_hz
}
