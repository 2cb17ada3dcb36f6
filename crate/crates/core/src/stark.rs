//! ac Stark shifts of the qubit transition and the photon-scattering budget.
//!
//! Each dipole line `l` from a qubit level shifts that level by
//! `-(3 pi c^2 / 2 w_l^3) w_l Gamma_l [1/(w_l - w) + 1/(w_l + w)] I`
//! (rotating and counter-rotating terms) and scatters photons at
//! `(3 pi c^2 / 2 hbar w_l^3) (w / w_l)^3 w_l Gamma_l^2 [..]^2 I`, where `w_l`
//! is the branch weight of the line for the beam polarization. The shift of
//! the qubit transition per unit intensity is `psi`, in rad/s per W/m^2.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::atomic_data::{IonSpecies, LineGroup, QubitKind, TransitionLine};
use crate::beam::{kappa, optimal_offset, power_from_intensity, relative_intensity, BeamConfig, BeamDrive, Polarization};
use crate::chain::ChainGeometry;
use crate::constants::{omega_from_wavelength, wavelength_from_omega, C, HBAR};
use crate::error::{Error, Result};
use crate::numeric::golden_section_min;

/// Minimum allowed detuning from any line, in units of its decay rate.
pub const RESONANCE_GUARD_LINEWIDTHS: f64 = 1e3;
/// Splitting-to-waist ratio above which the small-ratio scattering estimate is flagged.
pub const DZ_OVER_W_WARNING: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMode {
    /// Fine structure neglected: one line per coarse transition.
    Coarse,
    /// One line per fine-structure component, weighted by branch weight.
    Fine,
}

impl std::str::FromStr for ShiftMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coarse" => Ok(ShiftMode::Coarse),
            "fine" => Ok(ShiftMode::Fine),
            _ => Err(Error::Validation(format!("unknown mode `{s}` (expected coarse|fine)"))),
        }
    }
}

/// An effective two-level channel with signed contribution to the qubit shift.
#[derive(Debug, Clone, PartialEq)]
struct Channel {
    label: String,
    omega: f64,
    gamma: f64,
    /// Net weight entering the transition shift (signed).
    shift_weight: f64,
    /// Weight entering the scattering rate.
    scatter_weight: f64,
}

fn prefactor(omega_line: f64) -> f64 {
    3.0 * PI * C * C / (2.0 * omega_line.powi(3))
}

fn detuning_factor(omega_line: f64, omega: f64) -> f64 {
    1.0 / (omega_line - omega) + 1.0 / (omega_line + omega)
}

/// Level shift per unit intensity (rad/s per W/m^2) of unit-weight line.
fn level_coefficient(omega_line: f64, gamma: f64, omega: f64) -> f64 {
    prefactor(omega_line) * gamma * detuning_factor(omega_line, omega) / HBAR
}

/// Scattering rate per unit intensity (1/s per W/m^2) of unit-weight line.
fn scatter_coefficient(omega_line: f64, gamma: f64, omega: f64) -> f64 {
    let d = gamma * detuning_factor(omega_line, omega);
    prefactor(omega_line) / HBAR * (omega / omega_line).powi(3) * d * d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineContribution {
    pub label: String,
    /// Signed contribution to psi, rad/s per W/m^2.
    pub shift_coefficient: f64,
    /// Contribution to the per-ion scattering rate, 1/s per W/m^2.
    pub scatter_coefficient: f64,
    /// Line angular frequency, rad/s.
    pub omega: f64,
    pub gamma: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarkResponse {
    /// Shift of the up-minus-down transition per unit intensity, rad/s per W/m^2.
    pub psi: f64,
    pub per_line_contributions: Vec<LineContribution>,
    /// Per-ion scattering rate per unit intensity, summed over both qubit levels.
    pub scatter_per_intensity: f64,
    pub mode: ShiftMode,
    pub polarization: Polarization,
    /// Laser angular frequency, rad/s.
    pub omega: f64,
}

impl StarkResponse {
    fn from_channels(channels: &[Channel], omega: f64, mode: ShiftMode, polarization: Polarization) -> Self {
        let per_line_contributions: Vec<LineContribution> = channels
            .iter()
            .map(|ch| LineContribution {
                label: ch.label.clone(),
                shift_coefficient: ch.shift_weight * level_coefficient(ch.omega, ch.gamma, omega),
                scatter_coefficient: ch.scatter_weight * scatter_coefficient(ch.omega, ch.gamma, omega),
                omega: ch.omega,
                gamma: ch.gamma,
                weight: ch.scatter_weight,
            })
            .collect();
        Self {
            psi: per_line_contributions.iter().map(|c| c.shift_coefficient).sum(),
            scatter_per_intensity: per_line_contributions.iter().map(|c| c.scatter_coefficient).sum(),
            per_line_contributions,
            mode,
            polarization,
            omega,
        }
    }

    /// True when psi is negligible against its own contributions (magic wavelength).
    pub fn is_singular(&self) -> bool {
        let scale: f64 = self.per_line_contributions.iter().map(|c| c.shift_coefficient.abs()).sum();
        self.psi.abs() <= 1e-9 * scale
    }
}

fn guard(lines: &[&TransitionLine], omega: f64) -> Result<()> {
    for line in lines {
        let detuning = (line.angular_frequency - omega).abs();
        if detuning < RESONANCE_GUARD_LINEWIDTHS * line.decay_rate {
            return Err(Error::Domain(format!(
                "laser at {:.4} nm is within {RESONANCE_GUARD_LINEWIDTHS} linewidths of the {} line ({:.4} nm)",
                wavelength_from_omega(omega) * 1e9,
                line.label(),
                wavelength_from_omega(line.angular_frequency) * 1e9
            )));
        }
    }
    Ok(())
}

/// Channels of one coarse group for a qubit level entering with `sign`.
fn group_channels(group: &LineGroup<'_>, polarization: Polarization, mode: ShiftMode, sign: f64) -> Vec<Channel> {
    match mode {
        ShiftMode::Fine => group
            .lines
            .iter()
            .map(|line| {
                let w = line.branch_weight(polarization);
                Channel {
                    label: line.label(),
                    omega: line.angular_frequency,
                    gamma: line.decay_rate,
                    shift_weight: sign * w,
                    scatter_weight: w,
                }
            })
            .collect(),
        ShiftMode::Coarse => {
            // degeneracy-weighted centroid of the fine-structure components
            let g_total: f64 = group.lines.iter().map(|l| l.upper.degeneracy() as f64).sum();
            let centroid = |f: fn(&TransitionLine) -> f64| {
                group.lines.iter().map(|l| l.upper.degeneracy() as f64 * f(l)).sum::<f64>() / g_total
            };
            vec![Channel {
                label: group.label(),
                omega: centroid(|l| l.angular_frequency),
                gamma: centroid(|l| l.decay_rate),
                shift_weight: sign,
                scatter_weight: 1.0,
            }]
        }
    }
}

/// Shift-per-intensity of the optical S1/2 - D5/2 qubit transition.
///
/// The lower qubit level is shifted by its S-P coupling and the upper level
/// by the D5/2 - nF series up to the species' truncation.
pub fn psi(species: &IonSpecies, omega: f64, polarization: Polarization, mode: ShiftMode) -> Result<StarkResponse> {
    if species.qubit_kind != QubitKind::OpticalSd {
        return Err(Error::Configuration(format!("{} is not configured as an optical S-D qubit", species.name)));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Validation("laser frequency must be positive".into()));
    }
    let sp = species.sp_groups();
    let df = species.df_groups();
    if sp.len() != 1 || df.is_empty() {
        return Err(Error::Configuration(format!(
            "{} lacks the S-P and D5/2-F lines needed for an optical qubit",
            species.name
        )));
    }
    let used: Vec<&TransitionLine> = sp.iter().chain(df.iter()).flat_map(|g| g.lines.iter().copied()).collect();
    guard(&used, omega)?;
    // the lower level shift enters the transition with a minus sign, the upper with a plus
    let channels: Vec<Channel> = sp
        .iter()
        .flat_map(|g| group_channels(g, polarization, mode, 1.0))
        .chain(df.iter().flat_map(|g| group_channels(g, polarization, mode, -1.0)))
        .collect();
    Ok(StarkResponse::from_channels(&channels, omega, mode, polarization))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarkProfile {
    /// Transition shift at each ion, rad/s.
    pub per_ion_shift: Vec<f64>,
    /// `E[i][j] = hbar (shift_i - shift_j)`, J.
    pub splitting_matrix: Vec<Vec<f64>>,
    /// 1/s
    pub per_ion_scatter: Vec<f64>,
    pub total_scatter: f64,
    /// `1 / total_scatter`, s.
    pub coherence_time: f64,
    /// Beam intensity at each ion, W/m^2.
    pub intensities: Vec<f64>,
    pub warnings: Vec<String>,
}

impl StarkProfile {
    /// Profile from explicit per-ion shifts (rad/s) and scattering rates (1/s).
    pub fn from_shifts(per_ion_shift: Vec<f64>, per_ion_scatter: Vec<f64>) -> Self {
        let splitting_matrix = per_ion_shift
            .iter()
            .map(|a| per_ion_shift.iter().map(|b| HBAR * (a - b)).collect())
            .collect();
        let total_scatter: f64 = per_ion_scatter.iter().sum();
        Self {
            intensities: vec![f64::NAN; per_ion_shift.len()],
            per_ion_shift,
            splitting_matrix,
            total_scatter,
            coherence_time: 1.0 / total_scatter,
            per_ion_scatter,
            warnings: Vec::new(),
        }
    }

    fn from_coefficients(geometry: &ChainGeometry, beam: &BeamConfig, shift_per_i: f64, scatter_per_i: f64) -> Self {
        let intensities: Vec<f64> = geometry.positions.iter().map(|&z| beam.intensity_at(z)).collect();
        let shifts = intensities.iter().map(|i| shift_per_i * i).collect();
        let scatter = intensities.iter().map(|i| scatter_per_i * i).collect();
        let mut profile = Self::from_shifts(shifts, scatter);
        profile.intensities = intensities;
        if let Some(dz) = geometry.min_spacing {
            if dz / beam.waist > DZ_OVER_W_WARNING {
                profile.warnings.push(format!(
                    "dz/W = {:.3} exceeds {DZ_OVER_W_WARNING}: the small-ratio scattering estimate degrades",
                    dz / beam.waist
                ));
            }
        }
        profile
    }

    pub fn n_ions(&self) -> usize {
        self.per_ion_shift.len()
    }

    /// `E_{i,j}`, J.
    pub fn splitting(&self, i: usize, j: usize) -> f64 {
        self.splitting_matrix[i][j]
    }
}

/// Per-ion shifts, splittings and scattering for an optical-qubit chain.
pub fn stark_profile(species: &IonSpecies, geometry: &ChainGeometry, beam: &BeamConfig, mode: ShiftMode) -> Result<StarkProfile> {
    beam.validate()?;
    let response = psi(species, beam.omega(), beam.polarization, mode)?;
    let mut profile = StarkProfile::from_coefficients(geometry, beam, response.psi, response.scatter_per_intensity);
    profile.warnings.splice(0..0, geometry.warnings.iter().cloned());
    Ok(profile)
}

/// Closed-form two-ion scattering rate for a beam at `W/2` with `dz/W << 1`:
/// `Gamma_sc = E/(kappa psi) * e^{-1/2} 3 pi c^2 w^3 / hbar * sum_l w_l Gamma_l^2 [..]^2 / w_l^6`.
pub fn two_ion_closed_form_scatter(target_e: f64, kappa: f64, response: &StarkResponse) -> f64 {
    let omega = response.omega;
    // psi in energy units per intensity, J / (W/m^2)
    let psi_energy = HBAR * response.psi.abs();
    let bracket: f64 = response
        .per_line_contributions
        .iter()
        .map(|c| {
            let d = c.gamma * detuning_factor(c.omega, omega);
            c.weight * d * d / c.omega.powi(6)
        })
        .sum();
    target_e / (kappa * psi_energy) * (-0.5f64).exp() * 3.0 * PI * C * C * omega.powi(3) / HBAR * bracket
}

/// Where the beam centre sits relative to the chain centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamPlacement {
    /// Offset `W/2`.
    HalfWaist,
    /// Offset maximising the splitting of the closest pair (golden-section search).
    Optimal,
    /// Explicit offset, m.
    Fixed(f64),
}

impl BeamPlacement {
    pub fn offset(&self, geometry: &ChainGeometry, waist: f64) -> Result<f64> {
        Ok(match *self {
            BeamPlacement::HalfWaist => 0.5 * waist,
            BeamPlacement::Optimal => optimal_offset(geometry.delta_z()?, waist),
            BeamPlacement::Fixed(c) => c,
        })
    }
}

/// Pair whose relative-intensity difference is smallest but nonzero; this is
/// the splitting a power solve targets. For two ions it is the only pair.
fn reference_pair(geometry: &ChainGeometry, waist: f64, offset: f64) -> Result<(usize, usize, f64)> {
    let rel: Vec<f64> = geometry.positions.iter().map(|&z| relative_intensity(z - offset, waist)).collect();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..rel.len() {
        for j in i + 1..rel.len() {
            let d = (rel[i] - rel[j]).abs();
            if d > 1e-15 && best.is_none_or(|b| d < b.2) {
                best = Some((i, j, d));
            }
        }
    }
    best.ok_or_else(|| Error::Singular("beam placement gives no intensity difference between ions".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSolution {
    /// W
    pub power: f64,
    /// W/m^2
    pub peak_intensity: f64,
    pub beam: BeamConfig,
    pub profile: StarkProfile,
    pub response: StarkResponse,
    /// Closed-form geometry factor at the closest-pair spacing.
    pub kappa: f64,
    /// Ion pair whose splitting equals the target.
    pub reference_pair: (usize, usize),
    /// Member of the reference pair with the higher transition frequency.
    pub upshifted_ion: usize,
}

fn invert_for_power(
    geometry: &ChainGeometry,
    waist: f64,
    wavelength: f64,
    target_e: f64,
    placement: BeamPlacement,
    shift_per_i: f64,
) -> Result<(BeamConfig, (usize, usize))> {
    if !(target_e.is_finite() && target_e > 0.0) {
        return Err(Error::Validation("target splitting must be positive".into()));
    }
    let offset = placement.offset(geometry, waist)?;
    let (i, j, rel_gap) = reference_pair(geometry, waist, offset)?;
    // E = hbar |psi| I0 |rel_i - rel_j|, linear in I0
    let peak_intensity = target_e / (HBAR * shift_per_i.abs() * rel_gap);
    let beam = BeamConfig::new(wavelength, waist, offset, BeamDrive::PeakIntensity(peak_intensity))?;
    Ok((beam, (i, j)))
}

fn upshifted(profile: &StarkProfile, pair: (usize, usize)) -> usize {
    if profile.per_ion_shift[pair.0] >= profile.per_ion_shift[pair.1] {
        pair.0
    } else {
        pair.1
    }
}

/// Beam power giving splitting `target_e` (J) for the closest ion pair.
///
/// The splitting is linear in peak intensity, so this is a single division.
#[allow(clippy::too_many_arguments)]
pub fn required_power(
    species: &IonSpecies,
    geometry: &ChainGeometry,
    waist: f64,
    wavelength: f64,
    target_e: f64,
    mode: ShiftMode,
    placement: BeamPlacement,
    polarization: Polarization,
) -> Result<PowerSolution> {
    let response = psi(species, omega_from_wavelength(wavelength), polarization, mode)?;
    if response.is_singular() {
        return Err(Error::Singular(format!(
            "psi vanishes at {:.3} nm (magic wavelength); choose a different wavelength",
            wavelength * 1e9
        )));
    }
    let (beam, pair) = invert_for_power(geometry, waist, wavelength, target_e, placement, response.psi)?;
    let beam = beam.with_polarization(polarization);
    let profile = stark_profile(species, geometry, &beam, mode)?;
    Ok(PowerSolution {
        power: beam.power(),
        peak_intensity: beam.peak_intensity(),
        kappa: kappa(geometry.delta_z()?, waist),
        upshifted_ion: upshifted(&profile, pair),
        reference_pair: pair,
        beam,
        profile,
        response,
    })
}

/// Fine-structure window of the ground-state S-P doublet, as (P1/2, P3/2) lines.
fn zeeman_doublet(species: &IonSpecies) -> Result<(&TransitionLine, &TransitionLine, Vec<&TransitionLine>)> {
    if species.qubit_kind != QubitKind::ZeemanGround {
        return Err(Error::Configuration(format!("{} is not configured as a Zeeman ground-state qubit", species.name)));
    }
    let sp = species.sp_groups();
    let group = sp.first().ok_or_else(|| Error::Configuration("missing S-P lines".into()))?;
    let p12 = group.lines.iter().find(|l| l.upper.two_j == 1);
    let p32 = group.lines.iter().find(|l| l.upper.two_j == 3);
    match (p12, p32) {
        (Some(a), Some(b)) => Ok((a, b, group.lines.clone())),
        _ => Err(Error::Configuration("Zeeman qubit needs both P1/2 and P3/2 lines".into())),
    }
}

/// Differential shift of the two ground Zeeman sublevels per unit intensity.
///
/// `psi = shift(mJ=+1/2) - shift(mJ=-1/2)`. The weights stored for the
/// listed sublevel apply to it directly; the opposite sublevel sees sigma+
/// and sigma- exchanged. Scattering counts both sublevels.
pub fn zeeman_response(species: &IonSpecies, omega: f64, polarization: Polarization) -> Result<StarkResponse> {
    let (p12, p32, lines) = zeeman_doublet(species)?;
    if polarization == Polarization::LinearPi {
        return Err(Error::Domain(
            "linear polarization gives no differential ground-state shift; use sigma_plus or sigma_minus".into(),
        ));
    }
    let (lo, hi) = (p12.angular_frequency.min(p32.angular_frequency), p12.angular_frequency.max(p32.angular_frequency));
    if !(omega > lo && omega < hi) {
        return Err(Error::Domain(format!(
            "{:.4} nm lies outside the fine-structure window ({:.4} nm, {:.4} nm)",
            wavelength_from_omega(omega) * 1e9,
            wavelength_from_omega(hi) * 1e9,
            wavelength_from_omega(lo) * 1e9
        )));
    }
    guard(&lines, omega)?;
    let channels: Vec<Channel> = lines
        .iter()
        .map(|line| {
            let stored = line.branch_weight(polarization);
            let mirrored = line.mirrored_branch_weight(polarization);
            // listed sublevel is mJ=+1/2 unless the label says otherwise
            let (w_up, w_down) = match line.lower.two_mj {
                Some(m) if m < 0 => (mirrored, stored),
                _ => (stored, mirrored),
            };
            Channel {
                label: line.label(),
                omega: line.angular_frequency,
                gamma: line.decay_rate,
                // level shift is -w * coefficient
                shift_weight: w_down - w_up,
                scatter_weight: w_up + w_down,
            }
        })
        .collect();
    Ok(StarkResponse::from_channels(&channels, omega, ShiftMode::Fine, polarization))
}

/// Per-ion differential Zeeman-qubit shift and scattering under a circularly
/// polarized beam tuned between the P1/2 and P3/2 resonances.
pub fn zeeman_qubit_shift(species: &IonSpecies, geometry: &ChainGeometry, beam: &BeamConfig) -> Result<StarkProfile> {
    beam.validate()?;
    let response = zeeman_response(species, beam.omega(), beam.polarization)?;
    let mut profile = StarkProfile::from_coefficients(geometry, beam, response.psi, response.scatter_per_intensity);
    profile.warnings.splice(0..0, geometry.warnings.iter().cloned());
    Ok(profile)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeemanOptimum {
    /// m
    pub wavelength: f64,
    /// W
    pub power: f64,
    /// 1/s
    pub total_scatter: f64,
    pub beam: BeamConfig,
    pub profile: StarkProfile,
    pub response: StarkResponse,
}

/// Power and scattering for a Zeeman qubit at a fixed wavelength and target splitting.
pub fn zeeman_at_wavelength(
    species: &IonSpecies,
    geometry: &ChainGeometry,
    waist: f64,
    wavelength: f64,
    target_e: f64,
    polarization: Polarization,
    placement: BeamPlacement,
) -> Result<ZeemanOptimum> {
    let response = zeeman_response(species, omega_from_wavelength(wavelength), polarization)?;
    if response.is_singular() {
        return Err(Error::Singular("differential Zeeman shift vanishes at this wavelength".into()));
    }
    let (beam, _) = invert_for_power(geometry, waist, wavelength, target_e, placement, response.psi)?;
    let beam = beam.with_polarization(polarization);
    let profile = zeeman_qubit_shift(species, geometry, &beam)?;
    Ok(ZeemanOptimum {
        wavelength,
        power: beam.power(),
        total_scatter: profile.total_scatter,
        beam,
        profile,
        response,
    })
}

/// Wavelength inside the fine-structure window minimising total scattering at
/// fixed splitting `target_e`.
pub fn zeeman_optimum(
    species: &IonSpecies,
    geometry: &ChainGeometry,
    waist: f64,
    target_e: f64,
    polarization: Polarization,
    placement: BeamPlacement,
) -> Result<ZeemanOptimum> {
    let (p12, p32, _) = zeeman_doublet(species)?;
    let guard_omega = |l: &TransitionLine| RESONANCE_GUARD_LINEWIDTHS * l.decay_rate * 1.001;
    let (blue, red) = if p32.angular_frequency > p12.angular_frequency { (p32, p12) } else { (p12, p32) };
    let short = wavelength_from_omega(blue.angular_frequency - guard_omega(blue));
    let long = wavelength_from_omega(red.angular_frequency + guard_omega(red));
    let cost = |lambda: f64| {
        zeeman_at_wavelength(species, geometry, waist, lambda, target_e, polarization, placement)
            .map(|z| z.total_scatter)
            .unwrap_or(f64::INFINITY)
    };
    let (lambda, _) = golden_section_min(cost, short, long, 1e-15);
    zeeman_at_wavelength(species, geometry, waist, lambda, target_e, polarization, placement)
}

/// Required power for `target_e` (J), convenience for a two-ion splitting of `hbar wz / 2`.
pub fn half_motional_quantum(geometry: &ChainGeometry) -> f64 {
    0.5 * HBAR * geometry.omega_z()
}

/// Peak intensity from a power, for a given waist.
pub fn beam_power(peak_intensity: f64, waist: f64) -> f64 {
    power_from_intensity(peak_intensity, waist)
}
