//! One-dimensional parameter sweeps of the required power and scattering.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic_data::{IonSpecies, QubitKind};
use crate::beam::{Polarization, DEFAULT_RISE_TIME};
use crate::chain::{equilibrium_positions, ChainGeometry, TrapConfig};
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::stark::{psi, required_power, zeeman_at_wavelength, BeamPlacement, ShiftMode};

/// Requested two-ion splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSplitting {
    /// `hbar wz / 2`
    HalfHbarOmega,
    /// Multiple of `hbar wz`.
    HbarOmega(f64),
    Joules(f64),
}

impl TargetSplitting {
    pub fn joules(&self, omega_z: f64) -> f64 {
        match *self {
            TargetSplitting::HalfHbarOmega => 0.5 * HBAR * omega_z,
            TargetSplitting::HbarOmega(f) => f * HBAR * omega_z,
            TargetSplitting::Joules(e) => e,
        }
    }
}

impl std::str::FromStr for TargetSplitting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let number = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("bad number `{v}` in target splitting")))
        };
        if s == "half-hbar-omega" {
            Ok(TargetSplitting::HalfHbarOmega)
        } else if let Some(v) = s.strip_prefix("joules:") {
            Ok(TargetSplitting::Joules(number(v)?))
        } else if let Some(v) = s.strip_prefix("hbar-omega:") {
            Ok(TargetSplitting::HbarOmega(number(v)?))
        } else {
            Err(Error::Validation(format!(
                "unknown target `{s}` (expected half-hbar-omega, hbar-omega:F or joules:X)"
            )))
        }
    }
}

/// Fully resolved physical setup, SI units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub species: IonSpecies,
    /// rad/s
    pub omega_z: f64,
    pub n_ions: usize,
    /// m
    pub waist: f64,
    /// m
    pub wavelength: f64,
    pub target: TargetSplitting,
    pub mode: ShiftMode,
    pub placement: BeamPlacement,
    pub polarization: Polarization,
    /// s
    pub rise_time: f64,
}

impl Scenario {
    pub fn new(species: IonSpecies, omega_z: f64, n_ions: usize, waist: f64, wavelength: f64) -> Self {
        let polarization = match species.qubit_kind {
            QubitKind::OpticalSd => Polarization::LinearPi,
            QubitKind::ZeemanGround => Polarization::SigmaPlus,
        };
        Self {
            species,
            omega_z,
            n_ions,
            waist,
            wavelength,
            target: TargetSplitting::HalfHbarOmega,
            mode: ShiftMode::Fine,
            placement: BeamPlacement::Optimal,
            polarization,
            rise_time: DEFAULT_RISE_TIME,
        }
    }

    pub fn geometry(&self) -> Result<ChainGeometry> {
        equilibrium_positions(&TrapConfig::new(&self.species, self.omega_z, self.n_ions)?)
    }

    pub fn target_e(&self) -> f64 {
        self.target.joules(self.omega_z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Wavelength,
    Waist,
    OmegaZ,
    Offset,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Wavelength => "wavelength",
            SweepVariable::Waist => "waist",
            SweepVariable::OmegaZ => "omega_z",
            SweepVariable::Offset => "offset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// SI units of the variable.
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub scenario: Scenario,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Validation(format!("sweep range needs min < max (got {} .. {})", self.min, self.max)));
        }
        if self.points < 2 {
            return Err(Error::Validation("a sweep needs at least two points".into()));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::Validation("log spacing needs a positive range".into()));
        }
        if self.variable != SweepVariable::Offset && self.min <= 0.0 {
            return Err(Error::Validation(format!("{} must be positive", self.variable.name())));
        }
        self.scenario.species.validate()?;
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let t = k as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    /// m
    pub wavelength: f64,
    /// m
    pub waist: f64,
    /// rad/s
    pub omega_z: f64,
    /// m; absent on gap rows where placement could not be resolved.
    pub offset: Option<f64>,
    /// W
    pub power: Option<f64>,
    /// 1/s
    pub total_scatter: Option<f64>,
    /// s
    pub coherence_time: Option<f64>,
    pub kappa: Option<f64>,
    /// rad/s per W/m^2
    pub psi: Option<f64>,
    pub warnings: Vec<String>,
    /// Why this point has no result (near resonance, vanishing shift).
    pub gap: Option<String>,
}

fn point_scenario(spec: &SweepSpec, value: f64) -> Scenario {
    let mut s = spec.scenario.clone();
    match spec.variable {
        SweepVariable::Wavelength => s.wavelength = value,
        SweepVariable::Waist => s.waist = value,
        SweepVariable::OmegaZ => s.omega_z = value,
        SweepVariable::Offset => s.placement = BeamPlacement::Fixed(value),
    }
    s
}

/// Evaluate one scenario; near-resonance and vanishing-shift failures become
/// gap rows, anything else is an error.
pub fn evaluate_point(index: usize, value: f64, scenario: &Scenario, geometry: &ChainGeometry) -> Result<SweepRow> {
    let mut row = SweepRow {
        index,
        value,
        wavelength: scenario.wavelength,
        waist: scenario.waist,
        omega_z: scenario.omega_z,
        offset: None,
        power: None,
        total_scatter: None,
        coherence_time: None,
        kappa: None,
        psi: None,
        warnings: Vec::new(),
        gap: None,
    };
    let target = scenario.target_e();
    let outcome = match scenario.species.qubit_kind {
        QubitKind::OpticalSd => required_power(
            &scenario.species,
            geometry,
            scenario.waist,
            scenario.wavelength,
            target,
            scenario.mode,
            scenario.placement,
            scenario.polarization,
        )
        .map(|s| (s.beam, s.profile, s.response.psi, Some(s.kappa))),
        QubitKind::ZeemanGround => zeeman_at_wavelength(
            &scenario.species,
            geometry,
            scenario.waist,
            scenario.wavelength,
            target,
            scenario.polarization,
            scenario.placement,
        )
        .map(|z| {
            let k = geometry.delta_z().ok().map(|dz| crate::beam::kappa(dz, scenario.waist));
            (z.beam, z.profile, z.response.psi, k)
        }),
    };
    match outcome {
        Ok((beam, profile, psi_value, kappa)) => {
            row.offset = Some(beam.center_offset);
            row.power = Some(beam.power());
            row.total_scatter = Some(profile.total_scatter);
            row.coherence_time = Some(profile.coherence_time);
            row.kappa = kappa;
            row.psi = Some(psi_value);
            row.warnings = profile.warnings;
        }
        Err(e @ (Error::Domain(_) | Error::Singular(_))) => {
            if scenario.species.qubit_kind == QubitKind::OpticalSd {
                // psi is still meaningful at a singular (magic) point
                row.psi = psi(&scenario.species, crate::constants::omega_from_wavelength(scenario.wavelength), scenario.polarization, scenario.mode)
                    .ok()
                    .map(|r| r.psi);
            }
            row.warnings.push(e.to_string());
            row.gap = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    Ok(row)
}

/// All sweep rows, in index order. Points are evaluated in parallel.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let shared = if spec.variable == SweepVariable::OmegaZ { None } else { Some(spec.scenario.geometry()?) };
    spec.values()
        .into_par_iter()
        .enumerate()
        .map(|(index, value)| {
            let scenario = point_scenario(spec, value);
            match &shared {
                Some(g) => evaluate_point(index, value, &scenario, g),
                None => evaluate_point(index, value, &scenario, &scenario.geometry()?),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_data::builtin_species;
    use crate::constants::angular;

    fn spec(variable: SweepVariable, min: f64, max: f64, points: usize) -> SweepSpec {
        let s = builtin_species("Ca40+").unwrap();
        SweepSpec {
            variable,
            min,
            max,
            points,
            spacing: Spacing::Linear,
            scenario: Scenario::new(s, angular(1e6), 2, 30e-6, 1064e-9),
        }
    }

    #[test]
    fn target_parsing() {
        assert_eq!("half-hbar-omega".parse::<TargetSplitting>().unwrap(), TargetSplitting::HalfHbarOmega);
        assert_eq!("joules:1e-28".parse::<TargetSplitting>().unwrap(), TargetSplitting::Joules(1e-28));
        assert_eq!("hbar-omega:10".parse::<TargetSplitting>().unwrap(), TargetSplitting::HbarOmega(10.0));
        assert!("joules:x".parse::<TargetSplitting>().is_err());
        assert!("quarter".parse::<TargetSplitting>().is_err());
    }

    #[test]
    fn values_linear_and_log() {
        let mut s = spec(SweepVariable::Waist, 10e-6, 40e-6, 4);
        for (v, want) in s.values().iter().zip([10e-6, 20e-6, 30e-6, 40e-6]) {
            assert!((v - want).abs() < 1e-20);
        }
        s.spacing = Spacing::Log;
        s.min = 1e-6;
        s.max = 1e-4;
        s.points = 3;
        let v = s.values();
        assert!((v[1] - 1e-5).abs() < 1e-18);
    }

    #[test]
    fn invalid_specs() {
        assert!(spec(SweepVariable::Waist, 2.0, 1.0, 5).validate().is_err());
        assert!(spec(SweepVariable::Waist, 1.0, 2.0, 1).validate().is_err());
        assert!(spec(SweepVariable::Waist, -1.0, 2.0, 3).validate().is_err());
        assert!(spec(SweepVariable::Offset, -1e-6, 2e-6, 3).validate().is_ok());
    }

    #[test]
    fn resonance_gives_gap_rows() {
        let rows = run_sweep(&spec(SweepVariable::Wavelength, 396.90e-9, 397.02e-9, 25)).unwrap();
        assert_eq!(rows.len(), 25);
        assert!(rows.iter().enumerate().all(|(k, r)| r.index == k));
        assert!(rows.iter().any(|r| r.gap.is_some()));
        assert!(rows.iter().any(|r| r.gap.is_none()));
    }

    #[test]
    fn omega_sweep_rebuilds_chain() {
        let rows = run_sweep(&spec(SweepVariable::OmegaZ, angular(0.5e6), angular(2e6), 3)).unwrap();
        assert!(rows.iter().all(|r| r.power.is_some()));
        assert!(rows[0].power != rows[2].power);
    }
}
