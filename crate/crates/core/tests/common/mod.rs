//! Independent straight-line oracles shared by the integration tests. They
//! read the species files directly and use their own constants, so they do
//! not share code with the library.
#![allow(dead_code)]

use std::f64::consts::PI;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const C: f64 = 299_792_458.0;
pub const E: f64 = 1.602_176_634e-19;
pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const AMU: f64 = 1.660_539_066_60e-27;
pub const ME: f64 = 9.109_383_701_5e-31;

pub fn data_file(name: &str) -> String {
    let file = match name {
        "Ca40+" => "ca40.toml",
        "Sr88+" => "sr88.toml",
        "Ba138+" => "ba138.toml",
        other => panic!("no data file for {other}"),
    };
    std::fs::read_to_string(format!("{}/data/{file}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub struct OracleLine {
    pub lower: String,
    pub upper: String,
    pub omega: f64,
    pub gamma: f64,
    pub pi: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

pub struct OracleSpecies {
    pub mass: f64,
    pub truncation: u32,
    pub lines: Vec<OracleLine>,
}

pub fn species(name: &str) -> OracleSpecies {
    let doc: toml::Value = toml::from_str(&data_file(name)).unwrap();
    let lines = doc["lines"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| OracleLine {
            lower: l["lower"].as_str().unwrap().to_string(),
            upper: l["upper"].as_str().unwrap().to_string(),
            omega: 2.0 * PI * C / (l["wavelength_nm"].as_float().unwrap() * 1e-9),
            gamma: l["gamma_rad_s"].as_float().unwrap(),
            pi: l["pi_weight"].as_float().unwrap(),
            sigma_plus: l["sigma_plus_weight"].as_float().unwrap(),
            sigma_minus: l["sigma_minus_weight"].as_float().unwrap(),
        })
        .collect();
    OracleSpecies {
        mass: doc["mass_amu"].as_float().unwrap() * AMU,
        truncation: doc["series_truncation"].as_integer().unwrap() as u32,
        lines,
    }
}

fn principal(label: &str) -> u32 {
    label.chars().take_while(|c| c.is_ascii_digit()).collect::<String>().parse().unwrap()
}

fn orbital(label: &str) -> char {
    label.chars().find(|c| c.is_ascii_alphabetic()).unwrap()
}

/// +1 for lines from the lower qubit level (S-P), -1 for the upper (D-F),
/// 0 for lines that do not enter.
fn sign(line: &OracleLine, truncation: u32) -> f64 {
    match (orbital(&line.lower), orbital(&line.upper)) {
        ('S', 'P') => 1.0,
        ('D', 'F') if principal(&line.upper) <= truncation => -1.0,
        _ => 0.0,
    }
}

fn bracket(w0: f64, w: f64) -> f64 {
    1.0 / (w0 - w) + 1.0 / (w0 + w)
}

/// Optical-qubit shift per intensity for linear polarization, rad/s per W/m^2.
pub fn psi_pi(name: &str, wavelength: f64) -> f64 {
    let s = species(name);
    let w = 2.0 * PI * C / wavelength;
    let mut total = 0.0;
    for l in &s.lines {
        let sg = sign(l, s.truncation);
        if sg != 0.0 {
            total += sg * 3.0 * PI * C * C / (2.0 * l.omega.powi(3)) * l.pi * l.gamma * bracket(l.omega, w) / HBAR;
        }
    }
    total
}

/// Scattering rate per intensity for one ion, linear polarization, 1/s per W/m^2.
pub fn scatter_pi(name: &str, wavelength: f64) -> f64 {
    let s = species(name);
    let w = 2.0 * PI * C / wavelength;
    let mut total = 0.0;
    for l in &s.lines {
        if sign(l, s.truncation) != 0.0 {
            let b = l.gamma * bracket(l.omega, w);
            total += 3.0 * PI * C * C / (2.0 * HBAR * l.omega.powi(3)) * (w / l.omega).powi(3) * l.pi * b * b;
        }
    }
    total
}

pub fn two_ion_spacing(name: &str, omega_z: f64) -> f64 {
    let m = species(name).mass;
    (E * E / (2.0 * PI * EPS0 * m * omega_z * omega_z)).powf(1.0 / 3.0)
}

/// Two ions, beam at W/2, linear polarization: (power W, total scattering 1/s).
pub fn two_ion_power(name: &str, omega_z: f64, waist: f64, wavelength: f64, target: f64) -> (f64, f64) {
    let dz = two_ion_spacing(name, omega_z);
    let i = |z: f64| (-2.0 * (z - waist / 2.0).powi(2) / (waist * waist)).exp();
    let (a, b) = (i(-dz / 2.0), i(dz / 2.0));
    let i0 = target / (HBAR * psi_pi(name, wavelength).abs() * (a - b).abs());
    let scatter = scatter_pi(name, wavelength) * i0 * (a + b);
    (i0 * PI * waist * waist / 2.0, scatter)
}

/// Scaled equilibrium positions by plain gradient descent on
/// `sum u^2/2 + sum_{i<j} 1/|u_i - u_j|`.
pub fn descent_positions(n: usize) -> Vec<f64> {
    let mut u: Vec<f64> = (0..n).map(|i| (i as f64 - (n as f64 - 1.0) / 2.0) * 1.5).collect();
    let grad = |u: &[f64]| -> Vec<f64> {
        (0..u.len())
            .map(|i| {
                let mut g = u[i];
                for j in 0..u.len() {
                    if j != i {
                        let d = u[i] - u[j];
                        g -= d.signum() / (d * d);
                    }
                }
                g
            })
            .collect()
    };
    let mut step = 0.05;
    let mut g = grad(&u);
    for _ in 0..200_000 {
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-14 {
            break;
        }
        let trial: Vec<f64> = u.iter().zip(&g).map(|(x, gx)| x - step * gx).collect();
        let gt = grad(&trial);
        let nt = gt.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nt < norm {
            u = trial;
            g = gt;
            step *= 1.1;
        } else {
            step *= 0.5;
        }
    }
    u
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Axial Hessian of the scaled potential at positions `u`.
pub fn scaled_hessian(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = 1.0;
        for j in 0..n {
            if j != i {
                let k = 2.0 / (u[i] - u[j]).abs().powi(3);
                a[i][i] += k;
                a[i][j] = -k;
            }
        }
    }
    a
}
