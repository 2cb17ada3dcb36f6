mod common;

use std::f64::consts::PI;

use acstark::atomic_data::builtin_species;
use acstark::beam::Polarization;
use acstark::chain::{equilibrium_positions, TrapConfig};
use acstark::constants::omega_from_wavelength;
use acstark::stark::{psi, required_power, two_ion_closed_form_scatter, BeamPlacement, ShiftMode};

const WZ: f64 = 2.0 * PI * 1e6;

/// Frozen outputs of the line-sum oracle at 1064 nm, 2 pi x 1 MHz, W = 30 um,
/// target hbar wz / 2, beam at W/2: (psi rad/s per W/m^2, power W, scattering 1/s).
const FROZEN: [(&str, f64, f64, f64); 3] = [
    ("Ca40+", 2.0592368588747117e-3, 9.626969654035108, 7.80748920991696e-2),
    ("Sr88+", 2.1880317518360106e-3, 11.727258003851848, 1.2581874038121704e-1),
    ("Ba138+", 3.5222842535879173e-3, 8.449649699011013, 1.646621805717737e-1),
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn oracle_reproduces_frozen_constants() {
    for (name, psi0, p0, s0) in FROZEN {
        assert!(rel(common::psi_pi(name, 1064e-9), psi0) < 1e-12);
        let (p, s) = common::two_ion_power(name, WZ, 30e-6, 1064e-9, 0.5 * common::HBAR * WZ);
        assert!(rel(p, p0) < 1e-12 && rel(s, s0) < 1e-12);
    }
}

#[test]
fn library_matches_frozen_constants() {
    for (name, psi0, p0, s0) in FROZEN {
        let species = builtin_species(name).unwrap();
        let r = psi(&species, omega_from_wavelength(1064e-9), Polarization::LinearPi, ShiftMode::Fine).unwrap();
        assert!(rel(r.psi, psi0) < 1e-9, "{name}: psi {} vs {psi0}", r.psi);
        let g = equilibrium_positions(&TrapConfig::new(&species, WZ, 2).unwrap()).unwrap();
        let sol = required_power(
            &species,
            &g,
            30e-6,
            1064e-9,
            0.5 * acstark::constants::HBAR * WZ,
            ShiftMode::Fine,
            BeamPlacement::HalfWaist,
            Polarization::LinearPi,
        )
        .unwrap();
        assert!(rel(sol.power, p0) < 1e-9, "{name}: power {} vs {p0}", sol.power);
        assert!(rel(sol.profile.total_scatter, s0) < 1e-9, "{name}: scatter {} vs {s0}", sol.profile.total_scatter);
    }
}

#[test]
fn library_matches_oracle_across_wavelengths() {
    for name in ["Ca40+", "Sr88+", "Ba138+"] {
        let species = builtin_species(name).unwrap();
        for lambda in [250e-9, 532e-9, 800e-9, 1064e-9, 1550e-9, 10.6e-6, 40e-6] {
            let r = psi(&species, omega_from_wavelength(lambda), Polarization::LinearPi, ShiftMode::Fine).unwrap();
            assert!(rel(r.psi, common::psi_pi(name, lambda)) < 1e-9, "{name} at {lambda}");
            assert!(rel(r.scatter_per_intensity, common::scatter_pi(name, lambda)) < 1e-9, "{name} at {lambda}");
            let sum: f64 = r.per_line_contributions.iter().map(|c| c.shift_coefficient).sum();
            assert!(rel(sum, r.psi) < 1e-12);
        }
    }
}

#[test]
fn closed_form_scattering_matches_line_sum() {
    let species = builtin_species("Ca40+").unwrap();
    for (omega_z, waist) in [(WZ, 60e-6), (WZ, 100e-6), (2.0 * PI * 3e6, 40e-6)] {
        let g = equilibrium_positions(&TrapConfig::new(&species, omega_z, 2).unwrap()).unwrap();
        let dz = g.delta_z().unwrap();
        assert!(dz / waist <= 0.1);
        let target = 0.5 * acstark::constants::HBAR * omega_z;
        let sol = required_power(&species, &g, waist, 1064e-9, target, ShiftMode::Fine, BeamPlacement::HalfWaist, Polarization::LinearPi)
            .unwrap();
        let closed = two_ion_closed_form_scatter(target, sol.kappa, &sol.response);
        assert!(rel(closed, sol.profile.total_scatter) < 0.01);
    }
}

#[test]
fn coarse_and_fine_converge_far_from_resonance() {
    let species = builtin_species("Ca40+").unwrap();
    let w = omega_from_wavelength(10.6e-6);
    let fine = psi(&species, w, Polarization::LinearPi, ShiftMode::Fine).unwrap().psi;
    let coarse = psi(&species, w, Polarization::LinearPi, ShiftMode::Coarse).unwrap().psi;
    assert!(rel(coarse, fine) < 0.05);
}
