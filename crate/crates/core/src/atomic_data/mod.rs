//! Ion species, qubit-level definitions and dipole-transition tables.
//!
//! Every frequency is stored as an angular frequency (rad/s) and every rate
//! as an Einstein A coefficient (rad/s). Fine-structure branch weights are
//! data, not derived at runtime; they are checked against the sum rule on
//! load.

mod builtin;
mod level;
mod loader;

use std::collections::BTreeMap;

pub use builtin::{builtin_names, builtin_species, builtin_species_all};
pub use level::LevelLabel;
pub use loader::{load_species, load_species_file, serialize_species};

use serde::{Deserialize, Serialize};

use crate::beam::Polarization;
use crate::constants::AMU;
use crate::error::{Error, Result};

/// Tolerance for the per-group branch-weight sum rule.
pub const BRANCH_SUM_TOLERANCE: f64 = 1e-12;
/// Allowed mismatch between a stored and a recomputed D5/2 lifetime.
pub const LIFETIME_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitKind {
    /// S1/2(mJ=+1/2) <-> D5/2(mJ=+5/2) optical qubit.
    #[serde(rename = "optical_SD")]
    OpticalSd,
    /// S1/2(mJ=-1/2) <-> S1/2(mJ=+1/2) ground-state Zeeman qubit.
    #[serde(rename = "zeeman_ground")]
    ZeemanGround,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionLine {
    pub lower: LevelLabel,
    pub upper: LevelLabel,
    /// rad/s
    pub angular_frequency: f64,
    /// Einstein A of the upper term into the lower term, rad/s.
    pub decay_rate: f64,
    pub pi_weight: f64,
    pub sigma_plus_weight: f64,
    pub sigma_minus_weight: f64,
    pub source_citation: String,
}

impl TransitionLine {
    /// Fraction of the coupling strength from the lower sublevel that reaches
    /// this fine-structure component for the given polarization.
    pub fn branch_weight(&self, polarization: Polarization) -> f64 {
        match polarization {
            Polarization::LinearPi => self.pi_weight,
            Polarization::SigmaPlus => self.sigma_plus_weight,
            Polarization::SigmaMinus => self.sigma_minus_weight,
        }
    }

    /// Branch weight seen from the mirrored sublevel (mJ -> -mJ), which
    /// exchanges the roles of sigma+ and sigma-.
    pub fn mirrored_branch_weight(&self, polarization: Polarization) -> f64 {
        self.branch_weight(polarization.mirrored())
    }

    pub fn is_electric_dipole(&self) -> bool {
        self.lower.l.abs_diff(self.upper.l) == 1 && self.lower.two_j.abs_diff(self.upper.two_j) <= 2
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.lower.term(), self.upper)
    }

    /// Key of the coarse group this line belongs to: lower sublevel plus the
    /// upper (n, L) configuration.
    pub fn group_key(&self) -> (LevelLabel, (u32, u32)) {
        (self.lower, self.upper.coarse())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IonSpecies {
    pub name: String,
    pub mass_amu: f64,
    pub charge: i32,
    pub qubit_kind: QubitKind,
    /// Highest principal quantum number of the D-F series that is summed.
    pub series_truncation: Option<u32>,
    pub transitions: Vec<TransitionLine>,
    /// Lifetime of D5/2, s; recomputed from the transition table on load.
    pub d52_lifetime: Option<f64>,
}

/// Lines of one coarse transition, split into fine-structure components.
#[derive(Debug, Clone)]
pub struct LineGroup<'a> {
    pub lower: LevelLabel,
    pub upper: (u32, u32),
    pub lines: Vec<&'a TransitionLine>,
}

impl LineGroup<'_> {
    pub fn label(&self) -> String {
        let upper = LevelLabel::new(self.upper.0, self.upper.1, 2 * self.upper.1 + 1);
        format!("{}-{}", self.lower.term(), upper.coarse_name())
    }
}

impl IonSpecies {
    /// Ion mass, kg.
    pub fn mass(&self) -> f64 {
        self.mass_amu * AMU
    }

    pub fn with_qubit_kind(mut self, kind: QubitKind) -> Result<Self> {
        self.qubit_kind = kind;
        self.validate()?;
        Ok(self)
    }

    pub fn with_series_truncation(mut self, max_n: u32) -> Self {
        self.series_truncation = Some(max_n);
        self
    }

    pub fn groups(&self) -> Vec<LineGroup<'_>> {
        let mut map: BTreeMap<(LevelLabel, (u32, u32)), Vec<&TransitionLine>> = BTreeMap::new();
        for line in &self.transitions {
            map.entry(line.group_key()).or_default().push(line);
        }
        map.into_iter()
            .map(|((lower, upper), lines)| LineGroup { lower, upper, lines })
            .collect()
    }

    /// Dipole groups from the S ground level up to a P configuration.
    pub fn sp_groups(&self) -> Vec<LineGroup<'_>> {
        self.groups()
            .into_iter()
            .filter(|g| g.lower.l == 0 && g.upper.1 == 1)
            .collect()
    }

    /// Dipole groups from the D5/2 qubit level up to F configurations,
    /// respecting the series truncation.
    pub fn df_groups(&self) -> Vec<LineGroup<'_>> {
        let cap = self.series_truncation.unwrap_or(u32::MAX);
        self.groups()
            .into_iter()
            .filter(|g| g.lower.l == 2 && g.lower.two_j == 5 && g.upper.1 == 3 && g.upper.0 <= cap)
            .collect()
    }

    /// 1 / sum of decay rates out of D5/2, or `None` when no channel is listed.
    pub fn derived_d52_lifetime(&self) -> Option<f64> {
        let total: f64 = self
            .transitions
            .iter()
            .filter(|t| t.upper.l == 2 && t.upper.two_j == 5)
            .map(|t| t.decay_rate)
            .sum();
        (total > 0.0).then(|| 1.0 / total)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass_amu.is_finite() && self.mass_amu > 0.0) {
            return Err(Error::Validation(format!("{}: mass must be positive", self.name)));
        }
        if self.charge < 1 {
            return Err(Error::Validation(format!("{}: charge must be positive", self.name)));
        }
        for line in &self.transitions {
            let label = line.label();
            if !(line.angular_frequency.is_finite() && line.angular_frequency > 0.0) {
                return Err(Error::Validation(format!("{label}: angular frequency must be positive")));
            }
            if !(line.decay_rate.is_finite() && line.decay_rate >= 0.0) {
                return Err(Error::Validation(format!("{label}: decay rate must be non-negative")));
            }
            for w in [line.pi_weight, line.sigma_plus_weight, line.sigma_minus_weight] {
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::Validation(format!("{label}: branch weight {w} outside [0, 1]")));
                }
            }
        }
        for group in self.groups() {
            for pol in Polarization::ALL {
                let sum: f64 = group.lines.iter().map(|l| l.branch_weight(pol)).sum();
                if (sum - 1.0).abs() > BRANCH_SUM_TOLERANCE {
                    return Err(Error::Validation(format!(
                        "{}: {} branch weights sum to {sum}, expected 1",
                        group.label(),
                        pol.name()
                    )));
                }
            }
        }
        let sp = self.sp_groups();
        if sp.len() != 1 {
            return Err(Error::Validation(format!(
                "{}: expected exactly one S-P group, found {}",
                self.name,
                sp.len()
            )));
        }
        match self.qubit_kind {
            QubitKind::OpticalSd => {
                if self.df_groups().is_empty() {
                    return Err(Error::Validation(format!("{}: optical_SD qubit needs at least one D5/2-F line", self.name)));
                }
            }
            QubitKind::ZeemanGround => {
                let js: Vec<u32> = sp[0].lines.iter().map(|l| l.upper.two_j).collect();
                if !(js.contains(&1) && js.contains(&3)) {
                    return Err(Error::Validation(format!(
                        "{}: zeeman_ground qubit needs both P1/2 and P3/2 lines",
                        self.name
                    )));
                }
            }
        }
        if let (Some(stored), Some(derived)) = (self.d52_lifetime, self.derived_d52_lifetime()) {
            if ((stored - derived) / derived).abs() > LIFETIME_TOLERANCE {
                return Err(Error::Validation(format!(
                    "{}: stored D5/2 lifetime {stored} s disagrees with transition data ({derived} s)",
                    self.name
                )));
            }
        }
        Ok(())
    }
}
