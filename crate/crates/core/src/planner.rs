//! Addressing plans built on top of Stark profiles.
//!
//! Case A keeps every splitting below one motional quantum and resolves the
//! target ion spectrally against the spectator carriers and first sidebands.
//! Case B pushes splittings well above the motional frequencies so that the
//! only spectator transitions near the target carrier are high-order
//! sidebands, suppressed as `eta^|m|`.
//!
//! Ion numbers in messages count from 1; indices in the API count from 0.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic_data::IonSpecies;
use crate::beam::{intensity_from_power, relative_intensity, BeamConfig, BeamDrive, Polarization, DEFAULT_RISE_TIME};
use crate::chain::{lamb_dicke, ChainGeometry};
use crate::constants::{omega_from_wavelength, HBAR};
use crate::error::{Error, Result};
use crate::stark::{psi, stark_profile, ShiftMode, StarkProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "case_A")]
    CaseA,
    #[serde(rename = "case_B")]
    CaseB,
}

/// Which target-ion transitions Case A must keep resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseATargets {
    /// Only the target carrier.
    CarrierOnly,
    /// Target carrier and its first red/blue sidebands on every mode.
    CarrierAndSidebands,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Plan is feasible when the margin is at least this many `gamma_res`.
    pub feasibility_factor: f64,
    /// A splitting within this many `gamma_res` of a mode frequency is a collision.
    pub collision_factor: f64,
    /// Thermal occupation used in sideband amplitudes.
    pub thermal_n: u32,
    pub max_sideband_order: u32,
    /// Case B spectator lines weaker than this amplitude do not limit the margin.
    pub crosstalk_floor: f64,
    pub lamb_dicke_limit: f64,
    /// Case B needs every nonzero splitting above this many `hbar wz`.
    pub case_b_min_splitting: f64,
    pub case_a_targets: CaseATargets,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            feasibility_factor: 10.0,
            collision_factor: 5.0,
            thermal_n: 0,
            max_sideband_order: 50,
            crosstalk_floor: 1e-4,
            lamb_dicke_limit: 0.3,
            case_b_min_splitting: 3.0,
            case_a_targets: CaseATargets::CarrierOnly,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCollision {
    pub mode_index: usize,
    /// rad/s
    pub mode_frequency: f64,
    pub ions: (usize, usize),
    /// |E_ij| / hbar, rad/s
    pub splitting: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddressingPlan {
    pub regime: Regime,
    /// rad/s
    pub gamma_res: f64,
    /// Resonance offset of each ion from the unshifted qubit frequency, rad/s.
    pub per_ion_resonance: Vec<f64>,
    /// Worst-case detuning of any target from any relevant spectator line, rad/s.
    pub selectivity_margin: f64,
    pub per_ion_margin: Vec<f64>,
    pub crosstalk_bound: f64,
    pub mode_collision_flags: Vec<ModeCollision>,
    pub feasible: bool,
    pub warnings: Vec<String>,
}

fn require_chain(profile: &StarkProfile, geometry: &ChainGeometry) -> Result<()> {
    if profile.n_ions() != geometry.n_ions() {
        return Err(Error::Validation(format!(
            "profile has {} ions but the chain has {}",
            profile.n_ions(),
            geometry.n_ions()
        )));
    }
    if profile.n_ions() < 2 {
        return Err(Error::Configuration("addressing needs at least two ions".into()));
    }
    Ok(())
}

/// Splittings `|E_ij| / hbar` that land within `window` of a mode frequency.
pub fn mode_collisions(shifts: &[f64], mode_frequencies: &[f64], window: f64) -> Vec<ModeCollision> {
    let mut out = Vec::new();
    for i in 0..shifts.len() {
        for j in i + 1..shifts.len() {
            let splitting = (shifts[i] - shifts[j]).abs();
            if splitting == 0.0 {
                continue;
            }
            for (k, &nu) in mode_frequencies.iter().enumerate() {
                if (splitting - nu).abs() < window {
                    out.push(ModeCollision { mode_index: k, mode_frequency: nu, ions: (i, j), splitting });
                }
            }
        }
    }
    out
}

/// Carrier plus first red/blue sidebands of every mode, relative to `shift`.
fn first_order_lines(shift: f64, mode_frequencies: &[f64]) -> impl Iterator<Item = f64> + '_ {
    std::iter::once(shift).chain(mode_frequencies.iter().flat_map(move |nu| [shift - nu, shift + nu]))
}

/// Case A margin of each target ion against every spectator carrier and
/// first-order sideband (all modes).
pub fn case_a_margins(shifts: &[f64], mode_frequencies: &[f64], targets: CaseATargets) -> Vec<f64> {
    (0..shifts.len())
        .map(|t| {
            let target_lines: Vec<f64> = match targets {
                CaseATargets::CarrierOnly => vec![shifts[t]],
                CaseATargets::CarrierAndSidebands => first_order_lines(shifts[t], mode_frequencies).collect(),
            };
            (0..shifts.len())
                .filter(|&j| j != t)
                .flat_map(|j| first_order_lines(shifts[j], mode_frequencies))
                .flat_map(|s| target_lines.iter().map(move |x| (x - s).abs()))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Individual addressing with every splitting below one motional quantum.
pub fn plan_case_a(
    profile: &StarkProfile,
    geometry: &ChainGeometry,
    gamma_res: f64,
    config: &PlannerConfig,
) -> Result<AddressingPlan> {
    require_chain(profile, geometry)?;
    let wz = geometry.omega_z();
    let shifts = &profile.per_ion_shift;
    for i in 0..shifts.len() {
        for j in i + 1..shifts.len() {
            let split = (shifts[i] - shifts[j]).abs();
            if split >= wz {
                return Err(Error::Regime(format!(
                    "|E_{},{}| = {:.4} hbar wz is not below hbar wz; use Case B",
                    i + 1,
                    j + 1,
                    split / wz
                )));
            }
        }
    }
    let per_ion_margin = case_a_margins(shifts, &geometry.mode_frequencies, config.case_a_targets);
    let margin = per_ion_margin.iter().copied().fold(f64::INFINITY, f64::min);
    let collisions = mode_collisions(shifts, &geometry.mode_frequencies, config.collision_factor * gamma_res);
    // off-resonant amplitude of a resolution-limited pulse at the margin detuning
    let crosstalk = gamma_res / (gamma_res * gamma_res + margin * margin).sqrt();
    let mut warnings = profile.warnings.clone();
    if shifts.len() > 2 {
        warnings.push(format!(
            "Case A with {} ions: margins reported without a feasibility cliff beyond the threshold test",
            shifts.len()
        ));
    }
    Ok(AddressingPlan {
        regime: Regime::CaseA,
        gamma_res,
        per_ion_resonance: shifts.clone(),
        selectivity_margin: margin,
        per_ion_margin,
        crosstalk_bound: crosstalk,
        feasible: margin >= config.feasibility_factor * gamma_res && collisions.is_empty(),
        mode_collision_flags: collisions,
        warnings,
    })
}

/// Leading-order Lamb-Dicke amplitude of the `order`-th sideband from `n`:
/// `eta^m sqrt((n+m)!/n!) / m!`.
pub fn sideband_amplitude(eta: f64, order: u32, n: u32) -> f64 {
    let mut amp = 1.0;
    for k in 1..=order {
        amp *= eta * ((n + k) as f64).sqrt() / k as f64;
    }
    amp
}

/// Individual addressing with splittings far above the motional frequencies.
pub fn plan_case_b(
    profile: &StarkProfile,
    geometry: &ChainGeometry,
    gamma_res: f64,
    probe_wavevector: f64,
    config: &PlannerConfig,
) -> Result<AddressingPlan> {
    require_chain(profile, geometry)?;
    let wz = geometry.omega_z();
    let n_ions = geometry.n_ions();
    let shifts = &profile.per_ion_shift;
    let scale = shifts.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let degenerate = |d: f64| d <= 1e-12 * scale;
    for i in 0..n_ions {
        for j in i + 1..n_ions {
            let split = (shifts[i] - shifts[j]).abs();
            if !degenerate(split) && split <= config.case_b_min_splitting * wz {
                return Err(Error::Regime(format!(
                    "|E_{},{}| = {:.4} hbar wz is not above {} hbar wz; use Case A",
                    i + 1,
                    j + 1,
                    split / wz,
                    config.case_b_min_splitting
                )));
            }
        }
    }
    let modes = &geometry.mode_frequencies;
    let mut eta = vec![vec![0.0; modes.len()]; n_ions];
    for (ion, row) in eta.iter_mut().enumerate() {
        for (k, value) in row.iter_mut().enumerate() {
            *value = lamb_dicke(geometry, k, probe_wavevector, ion)?;
            if *value >= config.lamb_dicke_limit {
                return Err(Error::LambDicke { eta: *value, ion, mode: k, limit: config.lamb_dicke_limit });
            }
        }
    }

    let mut warnings = profile.warnings.clone();
    let mut per_ion_margin = vec![f64::INFINITY; n_ions];
    let mut crosstalk = 0.0f64;
    let cap = config.max_sideband_order as i64;
    for t in 0..n_ions {
        for j in (0..n_ions).filter(|&j| j != t) {
            let delta = shifts[t] - shifts[j];
            if degenerate(delta.abs()) {
                if t < j {
                    warnings.push(format!("ions {} and {} share a resonance and are addressed together", t + 1, j + 1));
                }
                continue;
            }
            for (k, &nu) in modes.iter().enumerate() {
                let nearest = ((delta / nu).round() as i64).clamp(-cap, cap);
                crosstalk = crosstalk.max(sideband_amplitude(eta[j][k], nearest.unsigned_abs() as u32, config.thermal_n));
                for m in -cap..=cap {
                    let amp = sideband_amplitude(eta[j][k], m.unsigned_abs() as u32, config.thermal_n);
                    if amp < config.crosstalk_floor {
                        continue;
                    }
                    per_ion_margin[t] = per_ion_margin[t].min((delta - m as f64 * nu).abs());
                }
            }
        }
    }
    let margin = per_ion_margin.iter().copied().fold(f64::INFINITY, f64::min);
    let collisions = mode_collisions(shifts, modes, config.collision_factor * gamma_res);
    Ok(AddressingPlan {
        regime: Regime::CaseB,
        gamma_res,
        per_ion_resonance: shifts.clone(),
        selectivity_margin: margin,
        per_ion_margin,
        crosstalk_bound: crosstalk,
        feasible: margin >= config.feasibility_factor * gamma_res && collisions.is_empty(),
        mode_collision_flags: collisions,
        warnings,
    })
}

/// Allowed beam parameters for a pair-gate placement search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBeamTemplate {
    /// m
    pub wavelength: f64,
    /// m
    pub waist_min: f64,
    /// m
    pub waist_max: f64,
    pub waist_steps: usize,
    /// W
    pub max_power: f64,
    pub polarization: Polarization,
    /// s
    pub rise_time: f64,
}

impl PairBeamTemplate {
    pub fn fixed_waist(wavelength: f64, waist: f64, max_power: f64) -> Self {
        Self {
            wavelength,
            waist_min: waist,
            waist_max: waist,
            waist_steps: 1,
            max_power,
            polarization: Polarization::LinearPi,
            rise_time: DEFAULT_RISE_TIME,
        }
    }

    fn waists(&self) -> Vec<f64> {
        if self.waist_steps <= 1 || self.waist_max <= self.waist_min {
            return vec![self.waist_min];
        }
        let step = (self.waist_max - self.waist_min) / (self.waist_steps - 1) as f64;
        (0..self.waist_steps).map(|k| self.waist_min + step * k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPlan {
    pub beam: BeamConfig,
    pub plan: AddressingPlan,
    pub profile: StarkProfile,
    pub pair: (usize, usize),
}

/// Beam that gives ions `i` and `j` a common resonance separated from every
/// other ion by at least `feasibility_factor * gamma_res`.
///
/// The beam is centred on the midpoint of the pair, so both see the same
/// intensity. Over the template's waists the one with the largest separation
/// at maximum power is kept (ties: smaller waist), and the power is then
/// lowered to just reach the separation threshold.
#[allow(clippy::too_many_arguments)]
pub fn pair_gate_plan(
    geometry: &ChainGeometry,
    species: &IonSpecies,
    template: &PairBeamTemplate,
    ion_i: usize,
    ion_j: usize,
    gamma_res: f64,
    mode: ShiftMode,
    config: &PlannerConfig,
) -> Result<PairPlan> {
    let n = geometry.n_ions();
    if n < 2 {
        return Err(Error::Configuration("pair addressing needs at least two ions".into()));
    }
    for idx in [ion_i, ion_j] {
        if idx >= n {
            return Err(Error::Index { what: "ions", index: idx, len: n });
        }
    }
    if ion_i == ion_j {
        return Err(Error::Validation("pair ions must differ".into()));
    }
    let (a, b) = (ion_i.min(ion_j), ion_i.max(ion_j));
    let z = &geometry.positions;
    let center = 0.5 * (z[a] + z[b]);
    let response = psi(species, omega_from_wavelength(template.wavelength), template.polarization, mode)?;
    let psi_abs = response.psi.abs();
    let required = config.feasibility_factor * gamma_res;

    let candidates: Vec<(f64, f64, f64)> = template
        .waists()
        .into_par_iter()
        .map(|w| {
            let common = relative_intensity(z[a] - center, w);
            let gap = (0..n)
                .filter(|&k| k != a && k != b)
                .map(|k| (common - relative_intensity(z[k] - center, w)).abs())
                .fold(f64::INFINITY, f64::min);
            let margin_at_max = psi_abs * intensity_from_power(template.max_power, w) * gap;
            (w, gap, margin_at_max)
        })
        .collect();
    // deterministic merge: best margin, then smaller waist
    let (waist, gap, best_margin) = candidates
        .iter()
        .copied()
        .reduce(|best, c| if c.2 > best.2 { c } else { best })
        .expect("at least one waist candidate");

    let peak_intensity = if gap.is_infinite() {
        0.0
    } else {
        if best_margin < required {
            return Err(Error::Infeasible {
                message: format!(
                    "no waist in [{:.3e}, {:.3e}] m reaches {} x gamma_res separation within {} W",
                    template.waist_min, template.waist_max, config.feasibility_factor, template.max_power
                ),
                best_margin_rad_s: best_margin,
            });
        }
        required / (psi_abs * gap) * (1.0 + 1e-9)
    };
    let beam = BeamConfig::new(template.wavelength, waist, center, BeamDrive::PeakIntensity(peak_intensity))?
        .with_polarization(template.polarization)
        .with_rise_time(template.rise_time);
    let profile = stark_profile(species, geometry, &beam, mode)?;
    let shifts = &profile.per_ion_shift;
    let separation = (0..n)
        .filter(|&k| k != a && k != b)
        .map(|k| (shifts[a] - shifts[k]).abs())
        .fold(f64::INFINITY, f64::min);
    let collisions = mode_collisions(shifts, &geometry.mode_frequencies, config.collision_factor * gamma_res);
    let mut warnings = profile.warnings.clone();
    if gap.is_infinite() {
        warnings.push("no spectator ions: the pair shares a resonance without a Stark beam".into());
    }
    let regime = if separation < geometry.omega_z() { Regime::CaseA } else { Regime::CaseB };
    let per_ion_margin = (0..n)
        .map(|k| if k == a || k == b { separation } else { (shifts[a] - shifts[k]).abs() })
        .collect();
    let plan = AddressingPlan {
        regime,
        gamma_res,
        per_ion_resonance: shifts.clone(),
        selectivity_margin: separation,
        per_ion_margin,
        crosstalk_bound: if separation.is_finite() {
            gamma_res / (gamma_res * gamma_res + separation * separation).sqrt()
        } else {
            0.0
        },
        feasible: separation >= required && collisions.is_empty(),
        mode_collision_flags: collisions,
        warnings,
    };
    Ok(PairPlan { beam, plan, profile, pair: (a, b) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanicalCheck {
    /// `E / dz` estimate of the gradient force, N.
    pub f_grad: f64,
    /// Largest `hbar |psi dI/dz|` over the ions, N.
    pub f_grad_exact: f64,
    /// Trap restoring force at `dz / 2`, N.
    pub trap_force: f64,
    pub force_ratio: f64,
    /// Gradient-induced equilibrium displacement, m.
    pub delta_z_shift: f64,
    /// `sigma_z / delta_z_shift`.
    pub spread_ratio: f64,
    /// Rise time keeping the kick energy below `0.01 hbar wz`, s.
    pub min_rise_time: f64,
    pub rise_time: f64,
    pub pass: bool,
}

pub const MIN_FORCE_RATIO: f64 = 1e3;
pub const MIN_SPREAD_RATIO: f64 = 10.0;
pub const KICK_ENERGY_FRACTION: f64 = 0.01;

/// Gradient-force, displacement and switch-on checks for a Stark beam.
pub fn mechanical_check(profile: &StarkProfile, geometry: &ChainGeometry, beam: &BeamConfig) -> Result<MechanicalCheck> {
    require_chain(profile, geometry)?;
    let z = &geometry.positions;
    let m = geometry.mass();
    let wz = geometry.omega_z();
    // adjacent pair with the largest splitting-to-spacing ratio
    let (split, spacing) = (0..z.len() - 1)
        .map(|i| (profile.splitting(i, i + 1).abs(), z[i + 1] - z[i]))
        .max_by(|x, y| (x.0 / x.1).total_cmp(&(y.0 / y.1)))
        .expect("at least two ions");
    let f_grad = split / spacing;
    let f_grad_exact = z
        .iter()
        .zip(&profile.per_ion_shift)
        .map(|(&zi, &shift)| {
            let r = zi - beam.center_offset;
            HBAR * (shift * 4.0 * r / (beam.waist * beam.waist)).abs()
        })
        .fold(0.0, f64::max);
    let trap_force = m * wz * wz * spacing / 2.0;
    let delta_z_shift = f_grad / (m * wz * wz);
    let min_rise_time = delta_z_shift * (m / (2.0 * KICK_ENERGY_FRACTION * HBAR * wz)).sqrt();
    let force_ratio = trap_force / f_grad;
    let spread_ratio = geometry.sigma_z / delta_z_shift;
    Ok(MechanicalCheck {
        f_grad,
        f_grad_exact,
        trap_force,
        force_ratio,
        delta_z_shift,
        spread_ratio,
        min_rise_time,
        rise_time: beam.rise_time,
        pass: force_ratio >= MIN_FORCE_RATIO && spread_ratio >= MIN_SPREAD_RATIO && beam.rise_time >= min_rise_time,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLedger {
    /// s
    pub duration: f64,
    /// Phase accumulation rate of each ion, rad/s.
    pub per_ion_rate: Vec<f64>,
    /// Accumulated phase over the pulse, rad.
    pub per_ion_phase: Vec<f64>,
    /// Same, reduced to [0, 2 pi).
    pub per_ion_phase_wrapped: Vec<f64>,
    /// `phase_i - phase_j`, rad.
    pub differences: Vec<Vec<f64>>,
}

/// Phase each ion accumulates relative to the unshifted qubit while the
/// Stark beam is on, to be compensated on the addressing field.
pub fn phase_ledger(profile: &StarkProfile, pulse_duration: f64) -> Result<PhaseLedger> {
    if !(pulse_duration >= 0.0 && pulse_duration.is_finite()) {
        return Err(Error::Validation("pulse duration must be non-negative".into()));
    }
    let per_ion_phase: Vec<f64> = profile.per_ion_shift.iter().map(|s| s * pulse_duration).collect();
    let differences = per_ion_phase
        .iter()
        .map(|a| per_ion_phase.iter().map(|b| a - b).collect())
        .collect();
    Ok(PhaseLedger {
        duration: pulse_duration,
        per_ion_rate: profile.per_ion_shift.clone(),
        per_ion_phase_wrapped: per_ion_phase.iter().map(|p| p.rem_euclid(2.0 * PI)).collect(),
        per_ion_phase,
        differences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_data::builtin_species;
    use crate::chain::{equilibrium_positions, TrapConfig};
    use crate::constants::angular;

    fn chain(n: usize) -> ChainGeometry {
        let s = builtin_species("Ca40+").unwrap();
        equilibrium_positions(&TrapConfig::new(&s, angular(1e6), n).unwrap()).unwrap()
    }

    fn profile(shifts: &[f64]) -> StarkProfile {
        StarkProfile::from_shifts(shifts.to_vec(), vec![1.0; shifts.len()])
    }

    #[test]
    fn case_a_half_quantum_margin() {
        let g = chain(2);
        let wz = g.omega_z();
        let plan = plan_case_a(&profile(&[0.0, 0.5 * wz]), &g, wz / 20.0, &PlannerConfig::default()).unwrap();
        assert!((plan.selectivity_margin / wz - 0.5).abs() < 1e-12);
        assert!(plan.feasible);
        let worse = plan_case_a(&profile(&[0.0, 0.5 * wz]), &g, wz / 19.0, &PlannerConfig::default()).unwrap();
        assert!(!worse.feasible);
    }

    #[test]
    fn case_a_boundary_is_regime_error() {
        let g = chain(2);
        let wz = g.omega_z();
        let err = plan_case_a(&profile(&[0.0, wz]), &g, 1.0, &PlannerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Regime(ref m) if m.contains("Case B")));
    }

    #[test]
    fn case_a_with_sidebands_shifts_optimum() {
        // target sidebands on one mode meet spectator sidebands on the stretch mode
        let g = chain(2);
        let wz = g.omega_z();
        let cfg = PlannerConfig { case_a_targets: CaseATargets::CarrierAndSidebands, ..Default::default() };
        let plan = plan_case_a(&profile(&[0.0, 0.5 * wz]), &g, 1.0, &cfg).unwrap();
        assert!((plan.selectivity_margin / wz - (3f64.sqrt() - 1.5)).abs() < 1e-9);
    }

    #[test]
    fn amplitude_formula() {
        // eta^5 sqrt(5!) / 5! at n = 0
        let a = sideband_amplitude(0.1, 5, 0);
        assert!((a - 1e-5 / 120f64.sqrt()).abs() < 1e-18);
        assert_eq!(sideband_amplitude(0.2, 0, 3), 1.0);
        let thermal = sideband_amplitude(0.1, 2, 1);
        assert!((thermal - 0.01 * 6f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn case_b_collision_flagged() {
        let g = chain(5);
        let wz = g.omega_z();
        let nu = g.mode_frequencies[3];
        assert!(nu > 3.0 * wz);
        let shifts = [0.0, nu, 2.0 * nu + 4.0 * wz, 3.0 * nu + 8.0 * wz, 4.0 * nu + 12.0 * wz];
        let k = 2.0 * PI / 729e-9;
        let plan = plan_case_b(&profile(&shifts), &g, k_gamma(), k, &PlannerConfig::default()).unwrap();
        assert!(!plan.mode_collision_flags.is_empty());
        assert!(plan.mode_collision_flags.iter().any(|c| c.mode_index == 3 && c.ions == (0, 1)));
        assert!(!plan.feasible);
    }

    fn k_gamma() -> f64 {
        angular(100.0)
    }

    #[test]
    fn case_b_rejects_small_splitting_and_large_eta() {
        let g = chain(2);
        let wz = g.omega_z();
        let cfg = PlannerConfig::default();
        assert!(matches!(plan_case_b(&profile(&[0.0, 2.0 * wz]), &g, 1.0, 1e6, &cfg), Err(Error::Regime(_))));
        assert!(matches!(
            plan_case_b(&profile(&[0.0, 10.0 * wz]), &g, 1.0, 1e8, &cfg),
            Err(Error::LambDicke { .. })
        ));
    }

    #[test]
    fn phase_ledger_basics() {
        let g = chain(2);
        let wz = g.omega_z();
        let p = profile(&[0.0, 0.5 * wz]);
        let zero = phase_ledger(&p, 0.0).unwrap();
        assert!(zero.per_ion_phase.iter().all(|&x| x == 0.0));
        let l = phase_ledger(&p, 2.0 * PI / wz).unwrap();
        assert!((l.differences[1][0] - PI).abs() < 1e-12);
        assert!(phase_ledger(&p, -1.0).is_err());
    }

    #[test]
    fn pair_plan_two_ions_is_trivial() {
        let g = chain(2);
        let s = builtin_species("Ca40+").unwrap();
        let t = PairBeamTemplate::fixed_waist(1064e-9, 30e-6, 10.0);
        let plan = pair_gate_plan(&g, &s, &t, 0, 1, angular(1e3), ShiftMode::Fine, &PlannerConfig::default()).unwrap();
        assert_eq!(plan.beam.center_offset, 0.0);
        assert_eq!(plan.profile.per_ion_shift[0], plan.profile.per_ion_shift[1]);
    }

    #[test]
    fn pair_plan_infeasible_reports_best_margin() {
        let g = chain(3);
        let s = builtin_species("Ca40+").unwrap();
        let t = PairBeamTemplate::fixed_waist(1064e-9, 30e-6, 1e-6);
        let err = pair_gate_plan(&g, &s, &t, 0, 2, angular(1e3), ShiftMode::Fine, &PlannerConfig::default()).unwrap_err();
        match err {
            Error::Infeasible { best_margin_rad_s, .. } => assert!(best_margin_rad_s > 0.0),
            other => panic!("{other}"),
        }
        assert!(pair_gate_plan(&g, &s, &t, 1, 1, 1.0, ShiftMode::Fine, &PlannerConfig::default()).is_err());
        assert!(matches!(
            pair_gate_plan(&g, &s, &t, 0, 3, 1.0, ShiftMode::Fine, &PlannerConfig::default()),
            Err(Error::Index { .. })
        ));
    }
}
