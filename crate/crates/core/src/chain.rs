//! Axial equilibrium and normal modes of an ion chain in a harmonic trap.
//!
//! Lengths are solved in units of `l = (Z^2 e^2 / 4 pi eps0 m wz^2)^(1/3)`,
//! where the force on ion `i` reads
//! `-u_i + sum_{j != i} sign(u_i - u_j) / (u_i - u_j)^2`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::atomic_data::IonSpecies;
use crate::constants::{E_CHARGE, EPSILON0, HBAR};
use crate::error::{Error, Result};

/// Newton iteration cap.
pub const MAX_ITERATIONS: usize = 200;
/// Chains longer than this usually need very stiff radial confinement to stay linear.
pub const LINEAR_CHAIN_WARNING_N: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Axial secular frequency, rad/s.
    pub omega_z: f64,
    pub n_ions: usize,
    /// Ion mass, kg.
    pub mass: f64,
    pub charge: i32,
}

impl TrapConfig {
    pub fn new(species: &IonSpecies, omega_z: f64, n_ions: usize) -> Result<Self> {
        let trap = Self { omega_z, n_ions, mass: species.mass(), charge: species.charge };
        trap.validate()?;
        Ok(trap)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_z.is_finite() && self.omega_z > 0.0) {
            return Err(Error::Validation(format!("omega_z must be positive, got {}", self.omega_z)));
        }
        if self.n_ions == 0 {
            return Err(Error::Validation("n_ions must be at least 1".into()));
        }
        if !(self.mass > 0.0) {
            return Err(Error::Validation("ion mass must be positive".into()));
        }
        Ok(())
    }

    /// Natural length scale of the chain, m.
    pub fn length_scale(&self) -> f64 {
        let q = self.charge as f64 * E_CHARGE;
        (q * q / (4.0 * PI * EPSILON0 * self.mass * self.omega_z * self.omega_z)).cbrt()
    }

    /// Two-ion equilibrium spacing `(e^2 / 2 pi eps0 m wz^2)^(1/3)`, m.
    pub fn two_ion_spacing(&self) -> f64 {
        let q = self.charge as f64 * E_CHARGE;
        (q * q / (2.0 * PI * EPSILON0 * self.mass * self.omega_z * self.omega_z)).cbrt()
    }

    /// Ground-state wavefunction spread `sqrt(hbar / 2 m wz)`, m.
    pub fn sigma_z(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega_z)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalModes {
    /// rad/s, ascending; the first is the centre-of-mass mode.
    pub frequencies: Vec<f64>,
    /// `vectors[mode][ion]`, orthonormal.
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainGeometry {
    pub trap: TrapConfig,
    /// m, ascending, centred on zero.
    pub positions: Vec<f64>,
    /// Smallest neighbour spacing, m; `None` for a single ion.
    pub min_spacing: Option<f64>,
    pub mode_frequencies: Vec<f64>,
    pub mode_vectors: Vec<Vec<f64>>,
    pub sigma_z: f64,
    /// Largest residual force per ion in units of `m wz^2 l`.
    pub residual: f64,
    pub warnings: Vec<String>,
}

impl ChainGeometry {
    pub fn n_ions(&self) -> usize {
        self.positions.len()
    }

    pub fn omega_z(&self) -> f64 {
        self.trap.omega_z
    }

    pub fn mass(&self) -> f64 {
        self.trap.mass
    }

    pub fn delta_z(&self) -> Result<f64> {
        self.min_spacing
            .ok_or_else(|| Error::Configuration("a single ion has no inter-ion spacing".into()))
    }

    /// Positions in units of the natural length scale.
    pub fn scaled_positions(&self) -> Vec<f64> {
        let l = self.trap.length_scale();
        self.positions.iter().map(|z| z / l).collect()
    }
}

fn forces(u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|i| {
            let coulomb: f64 = (0..u.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let d = u[i] - u[j];
                    d.signum() / (d * d)
                })
                .sum();
            coulomb - u[i]
        })
        .collect()
}

/// Scaled Hessian of the trap + Coulomb potential; its eigenvalues are
/// `(nu / wz)^2`.
pub fn hessian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 + (0..n).filter(|&k| k != i).map(|k| 2.0 / (u[i] - u[k]).abs().powi(3)).sum::<f64>()
        } else {
            -2.0 / (u[i] - u[j]).abs().powi(3)
        }
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn ordered(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[1] > w[0])
}

/// Damped Newton solve of the scaled force balance.
fn solve_scaled(n: usize) -> Result<(Vec<f64>, f64)> {
    if n == 1 {
        return Ok((vec![0.0], 0.0));
    }
    // quasi-uniform start using the empirical minimum-spacing law 2.018 / N^0.559
    let spacing = 2.018 / (n as f64).powf(0.559);
    let mut u: Vec<f64> = (0..n).map(|i| spacing * (i as f64 - 0.5 * (n - 1) as f64)).collect();
    let mut f = forces(&u);
    let mut norm = max_abs(&f);
    let tol = |u: &[f64]| 1e-13 * u.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);

    for _ in 0..MAX_ITERATIONS {
        if norm < tol(&u) {
            break;
        }
        let a = hessian(&u);
        let rhs = DVector::from_column_slice(&f);
        let step = a
            .clone()
            .cholesky()
            .map(|c| c.solve(&rhs))
            .or_else(|| a.lu().solve(&rhs))
            .ok_or_else(|| Error::Numeric { message: "singular chain Hessian".into(), residual: norm })?;
        let mut damping = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, d)| x + damping * d).collect();
            if ordered(&trial) {
                let trial_f = forces(&trial);
                let trial_norm = max_abs(&trial_f);
                if trial_norm < norm || damping < 1e-6 {
                    u = trial;
                    f = trial_f;
                    norm = trial_norm;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-12 {
                return Err(Error::Numeric { message: "line search failed".into(), residual: norm });
            }
        }
    }
    // centre exactly: sum of positions is zero
    let mean = u.iter().sum::<f64>() / n as f64;
    u.iter_mut().for_each(|x| *x -= mean);
    let residual = max_abs(&forces(&u));
    let min_gap = u.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if !(residual < 1e-10 * min_gap) {
        return Err(Error::Numeric {
            message: format!("equilibrium solve for {n} ions did not converge in {MAX_ITERATIONS} iterations"),
            residual,
        });
    }
    Ok((u, residual))
}

/// Normal modes about scaled equilibrium positions `u`.
pub fn normal_modes_scaled(u: &[f64], omega_z: f64) -> NormalModes {
    let eig = SymmetricEigen::new(hessian(u));
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let frequencies = order.iter().map(|&k| omega_z * eig.eigenvalues[k].max(0.0).sqrt()).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            // sign convention: last clearly nonzero component positive
            if let Some(last) = v.iter().rev().find(|x| x.abs() > 1e-9) {
                if *last < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            v
        })
        .collect();
    NormalModes { frequencies, vectors }
}

/// Normal modes of an existing geometry (recomputed from its positions).
pub fn normal_modes(geometry: &ChainGeometry) -> NormalModes {
    normal_modes_scaled(&geometry.scaled_positions(), geometry.omega_z())
}

/// Equilibrium positions, axial modes and ground-state spread for the trap.
pub fn equilibrium_positions(trap: &TrapConfig) -> Result<ChainGeometry> {
    trap.validate()?;
    let (u, residual) = solve_scaled(trap.n_ions)?;
    let l = trap.length_scale();
    let positions: Vec<f64> = u.iter().map(|x| x * l).collect();
    let min_spacing = positions.windows(2).map(|w| w[1] - w[0]).reduce(f64::min);
    let modes = normal_modes_scaled(&u, trap.omega_z);
    let mut warnings = Vec::new();
    if trap.n_ions > LINEAR_CHAIN_WARNING_N {
        warnings.push(format!(
            "N = {} exceeds {LINEAR_CHAIN_WARNING_N}: a linear chain requires strong radial confinement",
            trap.n_ions
        ));
    }
    Ok(ChainGeometry {
        trap: trap.clone(),
        positions,
        min_spacing,
        mode_frequencies: modes.frequencies,
        mode_vectors: modes.vectors,
        sigma_z: trap.sigma_z(),
        residual,
        warnings,
    })
}

/// Lamb-Dicke parameter `k |b| sqrt(hbar / 2 m nu)` of one ion in one mode.
pub fn lamb_dicke(geometry: &ChainGeometry, mode_index: usize, probe_wavevector: f64, ion_index: usize) -> Result<f64> {
    let n = geometry.n_ions();
    if mode_index >= n {
        return Err(Error::Index { what: "modes", index: mode_index, len: n });
    }
    if ion_index >= n {
        return Err(Error::Index { what: "ions", index: ion_index, len: n });
    }
    if !(probe_wavevector >= 0.0) {
        return Err(Error::Validation("probe wavevector must be non-negative".into()));
    }
    let nu = geometry.mode_frequencies[mode_index];
    let b = geometry.mode_vectors[mode_index][ion_index];
    Ok(probe_wavevector * b.abs() * (HBAR / (2.0 * geometry.mass() * nu)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_data::builtin_species;
    use crate::constants::angular;

    fn trap(name: &str, mhz: f64, n: usize) -> TrapConfig {
        TrapConfig::new(&builtin_species(name).unwrap(), angular(mhz * 1e6), n).unwrap()
    }

    #[test]
    fn single_ion_at_centre() {
        let g = equilibrium_positions(&trap("Ca40+", 1.0, 1)).unwrap();
        assert_eq!(g.positions, vec![0.0]);
        assert_eq!(g.min_spacing, None);
        assert_eq!(g.mode_frequencies, vec![angular(1e6)]);
    }

    #[test]
    fn two_ion_spacing_matches_closed_form() {
        for (name, mhz) in [("Ca40+", 1.0), ("Sr88+", 0.7), ("Ba138+", 2.5)] {
            let t = trap(name, mhz, 2);
            let g = equilibrium_positions(&t).unwrap();
            let rel = (g.min_spacing.unwrap() - t.two_ion_spacing()).abs() / t.two_ion_spacing();
            assert!(rel < 1e-9, "{name}: {rel}");
        }
    }

    #[test]
    fn two_and_three_ion_modes() {
        let wz = angular(1e6);
        let g2 = equilibrium_positions(&trap("Ca40+", 1.0, 2)).unwrap();
        assert!((g2.mode_frequencies[0] / wz - 1.0).abs() < 1e-9);
        assert!((g2.mode_frequencies[1] / wz - 3f64.sqrt()).abs() < 1e-9);
        let g3 = equilibrium_positions(&trap("Ca40+", 1.0, 3)).unwrap();
        assert!((g3.mode_frequencies[2] / wz - (29.0f64 / 5.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn mode_vectors_orthonormal_and_com_uniform() {
        let g = equilibrium_positions(&trap("Sr88+", 1.0, 7)).unwrap();
        let n = g.n_ions();
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|i| g.mode_vectors[a][i] * g.mode_vectors[b][i]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
        let com = 1.0 / (n as f64).sqrt();
        assert!(g.mode_vectors[0].iter().all(|b| (b - com).abs() < 1e-10));
        assert!((g.mode_frequencies[0] / g.omega_z() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn positions_centred_and_stationary() {
        let t = trap("Ba138+", 1.0, 12);
        let g = equilibrium_positions(&t).unwrap();
        assert!(g.positions.iter().sum::<f64>().abs() < 1e-12 * g.min_spacing.unwrap());
        assert!(g.residual < 1e-10 * g.min_spacing.unwrap() / t.length_scale());
        assert!(g.warnings.is_empty());
    }

    #[test]
    fn long_chain_warns() {
        let g = equilibrium_positions(&trap("Ca40+", 1.0, 21)).unwrap();
        assert_eq!(g.warnings.len(), 1);
    }

    #[test]
    fn deterministic() {
        let t = trap("Ca40+", 1.3, 9);
        assert_eq!(equilibrium_positions(&t).unwrap(), equilibrium_positions(&t).unwrap());
    }

    #[test]
    fn lamb_dicke_single_ion_729() {
        let g = equilibrium_positions(&trap("Ca40+", 1.0, 1)).unwrap();
        let k = 2.0 * PI / 729e-9;
        let eta = lamb_dicke(&g, 0, k, 0).unwrap();
        // hand value: k * sqrt(hbar / (2 * 40 u * 2 pi MHz)) = 0.0969
        assert!((eta - 0.0969).abs() < 5e-4, "{eta}");
        assert_eq!(lamb_dicke(&g, 0, 0.0, 0).unwrap(), 0.0);
        assert!(matches!(lamb_dicke(&g, 1, k, 0), Err(Error::Index { .. })));
        assert!(matches!(lamb_dicke(&g, 0, k, 3), Err(Error::Index { .. })));
    }

    #[test]
    fn stretch_mode_symmetric() {
        let g = equilibrium_positions(&trap("Ca40+", 1.0, 2)).unwrap();
        let k = 2.0 * PI / 729e-9;
        let a = lamb_dicke(&g, 1, k, 0).unwrap();
        let b = lamb_dicke(&g, 1, k, 1).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn spacing_scaling_exponent() {
        let a = equilibrium_positions(&trap("Ca40+", 1.0, 2)).unwrap().min_spacing.unwrap();
        let b = equilibrium_positions(&trap("Ca40+", 2.0, 2)).unwrap().min_spacing.unwrap();
        let p = (b / a).ln() / 2f64.ln();
        assert!((p + 2.0 / 3.0).abs() < 1e-6, "{p}");
    }

    #[test]
    fn rejects_invalid_trap() {
        let s = builtin_species("Ca40+").unwrap();
        assert!(TrapConfig::new(&s, 0.0, 2).is_err());
        assert!(TrapConfig::new(&s, 1.0, 0).is_err());
    }
}
