//! The displaced Gaussian Stark-shifting beam.
//!
//! The beam propagates perpendicular to the chain and is treated as
//! collimated across it, so only the one-dimensional profile along the chain
//! axis matters: `I(z) = I0 exp[-2 (z - c)^2 / W^2]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::omega_from_wavelength;
use crate::error::{Error, Result};
use crate::numeric::golden_section_max;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    LinearPi,
    SigmaPlus,
    SigmaMinus,
}

impl Polarization {
    pub const ALL: [Polarization; 3] = [Polarization::LinearPi, Polarization::SigmaPlus, Polarization::SigmaMinus];

    /// Polarization seen by the mirror-image sublevel (mJ -> -mJ).
    pub fn mirrored(self) -> Self {
        match self {
            Polarization::LinearPi => Polarization::LinearPi,
            Polarization::SigmaPlus => Polarization::SigmaMinus,
            Polarization::SigmaMinus => Polarization::SigmaPlus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarization::LinearPi => "linear_pi",
            Polarization::SigmaPlus => "sigma_plus",
            Polarization::SigmaMinus => "sigma_minus",
        }
    }
}

/// Which of peak intensity and power was specified; the other is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamDrive {
    /// W/m^2
    PeakIntensity(f64),
    /// W
    Power(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamConfig {
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// 1/e^2 intensity radius, m.
    pub waist: f64,
    /// Beam centre along the chain axis, relative to the chain centre, m.
    pub center_offset: f64,
    pub drive: BeamDrive,
    pub polarization: Polarization,
    /// 10-90 style switch-on time of the beam, s.
    pub rise_time: f64,
}

pub const DEFAULT_RISE_TIME: f64 = 1e-6;

impl BeamConfig {
    pub fn new(wavelength: f64, waist: f64, center_offset: f64, drive: BeamDrive) -> Result<Self> {
        let beam = Self {
            wavelength,
            waist,
            center_offset,
            drive,
            polarization: Polarization::LinearPi,
            rise_time: DEFAULT_RISE_TIME,
        };
        beam.validate()?;
        Ok(beam)
    }

    pub fn with_polarization(mut self, polarization: Polarization) -> Self {
        self.polarization = polarization;
        self
    }

    pub fn with_rise_time(mut self, rise_time: f64) -> Self {
        self.rise_time = rise_time;
        self
    }

    pub fn with_peak_intensity(mut self, intensity: f64) -> Self {
        self.drive = BeamDrive::PeakIntensity(intensity);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.waist.is_finite() && self.waist > 0.0) {
            return Err(Error::Validation(format!("beam waist must be positive, got {}", self.waist)));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::Validation(format!("wavelength must be positive, got {}", self.wavelength)));
        }
        if !self.center_offset.is_finite() {
            return Err(Error::Validation("beam offset must be finite".into()));
        }
        let value = match self.drive {
            BeamDrive::PeakIntensity(v) | BeamDrive::Power(v) => v,
        };
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Validation(format!("beam power/intensity must be non-negative, got {value}")));
        }
        if !(self.rise_time >= 0.0) {
            return Err(Error::Validation("rise time must be non-negative".into()));
        }
        Ok(())
    }

    /// Laser angular frequency, rad/s.
    pub fn omega(&self) -> f64 {
        omega_from_wavelength(self.wavelength)
    }

    pub fn peak_intensity(&self) -> f64 {
        match self.drive {
            BeamDrive::PeakIntensity(i) => i,
            BeamDrive::Power(p) => intensity_from_power(p, self.waist),
        }
    }

    pub fn power(&self) -> f64 {
        match self.drive {
            BeamDrive::PeakIntensity(i) => power_from_intensity(i, self.waist),
            BeamDrive::Power(p) => p,
        }
    }

    /// Intensity at axial position `z` (chain frame), W/m^2.
    pub fn intensity_at(&self, z: f64) -> f64 {
        self.peak_intensity() * relative_intensity(z - self.center_offset, self.waist)
    }

    /// d I / d z at axial position `z`, W/m^3.
    pub fn intensity_gradient_at(&self, z: f64) -> f64 {
        let r = z - self.center_offset;
        -4.0 * r / (self.waist * self.waist) * self.intensity_at(z)
    }
}

/// `exp(-2 r^2 / W^2)`
pub fn relative_intensity(r: f64, waist: f64) -> f64 {
    (-2.0 * r * r / (waist * waist)).exp()
}

/// `P = I0 pi W^2 / 2`
pub fn power_from_intensity(peak_intensity: f64, waist: f64) -> f64 {
    peak_intensity * PI * waist * waist / 2.0
}

pub fn intensity_from_power(power: f64, waist: f64) -> f64 {
    2.0 * power / (PI * waist * waist)
}

/// Geometry factor converting `psi * I0` into the splitting of two ions at
/// `W/2 -+ dz/2`:
/// `kappa = 2 sinh(dz/W) exp{-[1 + (dz/W)^2] / 2}`.
pub fn kappa(delta_z: f64, waist: f64) -> f64 {
    let x = delta_z / waist;
    2.0 * x.sinh() * (-0.5 * (1.0 + x * x)).exp()
}

/// Beam offset `c` maximising `I(c - dz/2) - I(c + dz/2)`.
///
/// Golden-section search on `[0, 2W]` to an absolute tolerance of `1e-4 W`.
/// For the mirrored pair (ion order swapped) the optimum is `-c`.
pub fn optimal_offset(delta_z: f64, waist: f64) -> f64 {
    let half = 0.5 * delta_z;
    let difference = |c: f64| relative_intensity(c - half, waist) - relative_intensity(c + half, waist);
    golden_section_max(difference, 0.0, 2.0 * waist, 1e-4 * waist).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn beam() -> BeamConfig {
        BeamConfig::new(1064e-9, 30e-6, 15e-6, BeamDrive::PeakIntensity(2.5e8)).unwrap()
    }

    #[test]
    fn intensity_landmarks() {
        let b = beam();
        let i0 = b.peak_intensity();
        assert_eq!(b.intensity_at(b.center_offset), i0);
        let at_waist = b.intensity_at(b.center_offset + b.waist);
        assert!((at_waist / (i0 * (-2.0f64).exp()) - 1.0).abs() < 1e-14);
        let at_half = b.intensity_at(b.center_offset + b.waist / 2.0);
        assert!((at_half / (i0 * (-0.5f64).exp()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(0.0, 30e-6), 0.0);
        // direct evaluation: 2 sinh(x) exp(-(1+x^2)/2) at x = 5.6/30
        let k = kappa(5.6e-6, 30e-6);
        assert!((k - 0.2239).abs() < 5e-4, "{k}");
        let small = kappa(0.01, 1.0);
        let linear = 2.0 * 0.01 * (-0.5f64).exp();
        assert!(((small - linear) / linear).abs() < 0.01);
    }

    #[test]
    fn optimal_offset_near_half_waist() {
        let w = 30e-6;
        let c = optimal_offset(1e-4 * w, w);
        assert!((c / w - 0.5).abs() < 1e-3, "{c}");
        for ratio in [0.05, 0.1, 0.19, 0.3] {
            let c = optimal_offset(ratio * w, w) / w;
            assert!((0.45..=0.55).contains(&c), "ratio {ratio}: {c}");
        }
    }

    #[test]
    fn optimal_offset_matches_grid_search() {
        let w = 30e-6;
        let dz = 0.19 * w;
        let f = |c: f64| relative_intensity(c - dz / 2.0, w) - relative_intensity(c + dz / 2.0, w);
        let best = (0..=200_000)
            .map(|k| 2.0 * w * k as f64 / 200_000.0)
            .max_by(|a, b| f(*a).partial_cmp(&f(*b)).unwrap())
            .unwrap();
        let c = optimal_offset(dz, w);
        assert!((c - best).abs() < 1e-4 * w);
        assert!((c / (w / 2.0) - 1.0).abs() < 0.03);
        // swapped ion order: mirror image
        let g = |c: f64| relative_intensity(c + dz / 2.0, w) - relative_intensity(c - dz / 2.0, w);
        assert!((g(-c) - f(c)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_waist() {
        assert!(BeamConfig::new(1064e-9, 0.0, 0.0, BeamDrive::Power(1.0)).is_err());
    }

    proptest! {
        #[test]
        fn kappa_is_two_point_difference(ratio in 1e-6f64..=3.0) {
            let w = 1.0;
            let dz = ratio * w;
            let direct = relative_intensity(w / 2.0 - dz / 2.0, w) - relative_intensity(w / 2.0 + dz / 2.0, w);
            prop_assert!((kappa(dz, w) - direct).abs() <= 1e-12);
        }

        #[test]
        fn power_intensity_round_trip(p in 1e-6f64..1e3, w in 1e-6f64..1e-3) {
            let back = power_from_intensity(intensity_from_power(p, w), w);
            prop_assert!(((back - p) / p).abs() <= 1e-12);
        }

        #[test]
        fn intensity_monotone_in_distance(a in 0.0f64..1e-4, b in 0.0f64..1e-4) {
            let bm = beam();
            let (near, far) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(bm.intensity_at(bm.center_offset + near) >= bm.intensity_at(bm.center_offset + far));
            prop_assert!(bm.intensity_at(bm.center_offset - far) > 0.0 || far > 1e-4);
        }
    }
}
