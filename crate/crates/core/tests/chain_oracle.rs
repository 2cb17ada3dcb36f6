mod common;

use std::f64::consts::PI;

use acstark::atomic_data::builtin_species;
use acstark::chain::{equilibrium_positions, lamb_dicke, TrapConfig};

const WZ: f64 = 2.0 * PI * 1e6;

fn geometry(name: &str, omega_z: f64, n: usize) -> acstark::chain::ChainGeometry {
    let s = builtin_species(name).unwrap();
    equilibrium_positions(&TrapConfig::new(&s, omega_z, n).unwrap()).unwrap()
}

#[test]
fn positions_match_gradient_descent() {
    for n in 1..=10 {
        let g = geometry("Ca40+", WZ, n);
        let oracle = common::descent_positions(n);
        let scale = oracle.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for (a, b) in g.scaled_positions().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8 * scale, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn mode_frequencies_match_jacobi() {
    for n in 2..=10 {
        let g = geometry("Sr88+", WZ, n);
        let oracle = common::jacobi_eigenvalues(common::scaled_hessian(&common::descent_positions(n)));
        for (f, ev) in g.mode_frequencies.iter().zip(&oracle) {
            assert!((f / WZ - ev.sqrt()).abs() < 1e-8, "n={n}");
        }
    }
}

#[test]
fn two_ion_spacing_closed_form() {
    for name in ["Ca40+", "Sr88+", "Ba138+"] {
        for f in [0.3e6, 0.7e6, 1e6, 5e6] {
            let g = geometry(name, 2.0 * PI * f, 2);
            let exact = common::two_ion_spacing(name, 2.0 * PI * f);
            assert!((g.delta_z().unwrap() - exact).abs() < 1e-9 * exact);
        }
    }
}

#[test]
fn spacing_scales_as_omega_to_minus_two_thirds() {
    let a = geometry("Ba138+", WZ, 2).delta_z().unwrap();
    let b = geometry("Ba138+", 4.0 * WZ, 2).delta_z().unwrap();
    let exponent = (b / a).ln() / 4f64.ln();
    assert!((exponent + 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn modes_are_orthonormal_with_uniform_com() {
    for n in 1..=12 {
        let g = geometry("Ca40+", WZ, n);
        assert!((g.mode_frequencies[0] / WZ - 1.0).abs() < 1e-9);
        for (a, va) in g.mode_vectors.iter().enumerate() {
            for (b, vb) in g.mode_vectors.iter().enumerate() {
                let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
        let com = 1.0 / (n as f64).sqrt();
        assert!(g.mode_vectors[0].iter().all(|c| (c - com).abs() < 1e-10));
        let sum: f64 = g.positions.iter().sum();
        assert!(sum.abs() < 1e-18);
    }
}

#[test]
fn positions_are_stationary() {
    for n in [2, 5, 10, 30] {
        let g = geometry("Ca40+", WZ, n);
        assert!(g.residual < 1e-10);
        assert_eq!(!g.warnings.is_empty(), n > 20);
    }
}

#[test]
fn lamb_dicke_values() {
    let k = 2.0 * PI / 729e-9;
    let single = geometry("Ca40+", WZ, 1);
    let species = builtin_species("Ca40+").unwrap();
    let eta = k * (common::HBAR / (2.0 * species.mass() * WZ)).sqrt();
    assert!((lamb_dicke(&single, 0, k, 0).unwrap() - eta).abs() < 1e-12);
    assert!((eta - 0.097).abs() < 0.002);
    let pair = geometry("Ca40+", WZ, 2);
    let a = lamb_dicke(&pair, 1, k, 0).unwrap();
    let b = lamb_dicke(&pair, 1, k, 1).unwrap();
    assert!((a - b).abs() < 1e-15);
    assert!(lamb_dicke(&pair, 0, 1e-30, 0).unwrap() < 1e-30);
    assert!(lamb_dicke(&pair, 2, k, 0).is_err());
    assert!(lamb_dicke(&pair, 0, k, 2).is_err());
}

#[test]
fn deterministic() {
    assert_eq!(geometry("Ba138+", WZ, 7), geometry("Ba138+", WZ, 7));
}
