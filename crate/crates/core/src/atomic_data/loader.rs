//! TOML species documents.
//!
//! A file holds either one species at top level or several under
//! `[[species]]`. Each line gives exactly one of `wavelength_nm` (vacuum)
//! or `omega_rad_s`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IonSpecies, LevelLabel, QubitKind, TransitionLine};
use crate::constants::omega_from_wavelength;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesDoc {
    name: String,
    mass_amu: f64,
    #[serde(default = "default_charge")]
    charge: i32,
    qubit_kind: QubitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    series_truncation: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d52_lifetime_s: Option<f64>,
    lines: Vec<LineDoc>,
}

fn default_charge() -> i32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineDoc {
    lower: String,
    upper: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wavelength_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega_rad_s: Option<f64>,
    gamma_rad_s: f64,
    pi_weight: f64,
    sigma_plus_weight: f64,
    sigma_minus_weight: f64,
    source_citation: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiDoc {
    species: Vec<SpeciesDoc>,
}

fn parse_error(err: toml::de::Error) -> Error {
    let message = err.message().to_string();
    // serde reports the field name in backticks
    let key = message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "document".to_string());
    Error::Parse { key, message }
}

fn line_from_doc(species: &str, idx: usize, doc: LineDoc) -> Result<TransitionLine> {
    let key = |k: &str| format!("{species}.lines[{idx}].{k}");
    let lower: LevelLabel = doc.lower.parse().map_err(|_| Error::Parse {
        key: key("lower"),
        message: format!("invalid level label `{}`", doc.lower),
    })?;
    let upper: LevelLabel = doc.upper.parse().map_err(|_| Error::Parse {
        key: key("upper"),
        message: format!("invalid level label `{}`", doc.upper),
    })?;
    let angular_frequency = match (doc.wavelength_nm, doc.omega_rad_s) {
        (Some(nm), None) => {
            if !(nm > 0.0) {
                return Err(Error::Parse { key: key("wavelength_nm"), message: "must be positive".into() });
            }
            omega_from_wavelength(nm * 1e-9)
        }
        (None, Some(omega)) => omega,
        _ => {
            return Err(Error::Parse {
                key: key("wavelength_nm"),
                message: "give exactly one of `wavelength_nm` and `omega_rad_s`".into(),
            })
        }
    };
    Ok(TransitionLine {
        lower,
        upper,
        angular_frequency,
        decay_rate: doc.gamma_rad_s,
        pi_weight: doc.pi_weight,
        sigma_plus_weight: doc.sigma_plus_weight,
        sigma_minus_weight: doc.sigma_minus_weight,
        source_citation: doc.source_citation,
    })
}

fn species_from_doc(doc: SpeciesDoc) -> Result<IonSpecies> {
    let name = doc.name;
    let transitions = doc
        .lines
        .into_iter()
        .enumerate()
        .map(|(i, l)| line_from_doc(&name, i, l))
        .collect::<Result<Vec<_>>>()?;
    let mut species = IonSpecies {
        name,
        mass_amu: doc.mass_amu,
        charge: doc.charge,
        qubit_kind: doc.qubit_kind,
        series_truncation: doc.series_truncation,
        transitions,
        d52_lifetime: doc.d52_lifetime_s,
    };
    species.validate()?;
    species.d52_lifetime = species.derived_d52_lifetime();
    Ok(species)
}

/// Parses and validates every species in a TOML document.
pub fn load_species(source: &str) -> Result<Vec<IonSpecies>> {
    let table: toml::Table = toml::from_str(source).map_err(parse_error)?;
    let docs = if table.contains_key("species") {
        MultiDoc::deserialize(table).map_err(parse_error)?.species
    } else {
        vec![SpeciesDoc::deserialize(table).map_err(parse_error)?]
    };
    docs.into_iter().map(species_from_doc).collect()
}

pub fn load_species_file(path: &Path) -> Result<Vec<IonSpecies>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_species(&text)
}

/// One-species TOML document; frequencies are written as `omega_rad_s`.
pub fn serialize_species(species: &IonSpecies) -> String {
    let doc = SpeciesDoc {
        name: species.name.clone(),
        mass_amu: species.mass_amu,
        charge: species.charge,
        qubit_kind: species.qubit_kind,
        series_truncation: species.series_truncation,
        d52_lifetime_s: species.d52_lifetime,
        lines: species
            .transitions
            .iter()
            .map(|t| LineDoc {
                lower: t.lower.to_string(),
                upper: t.upper.to_string(),
                wavelength_nm: None,
                omega_rad_s: Some(t.angular_frequency),
                gamma_rad_s: t.decay_rate,
                pi_weight: t.pi_weight,
                sigma_plus_weight: t.sigma_plus_weight,
                sigma_minus_weight: t.sigma_minus_weight,
                source_citation: t.source_citation.clone(),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("species document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_data::builtin_species;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"
name = "Test+"
mass_amu = 40.0
qubit_kind = "optical_SD"

[[lines]]
lower = "4S1/2 mJ=+1/2"
upper = "4P1/2"
wavelength_nm = 397.0
gamma_rad_s = 1.4e8
pi_weight = 0.5
sigma_plus_weight = 0.0
sigma_minus_weight = 0.6666666666666666
source_citation = "test"

[[lines]]
lower = "4S1/2 mJ=+1/2"
upper = "4P3/2"
wavelength_nm = 393.0
gamma_rad_s = 1.4e8
pi_weight = 0.4
sigma_plus_weight = 1.0
sigma_minus_weight = 0.3333333333333333
source_citation = "test"

[[lines]]
lower = "3D5/2 mJ=+5/2"
upper = "4F7/2"
omega_rad_s = 1.0e16
gamma_rad_s = 4.0e8
pi_weight = 1.0
sigma_plus_weight = 1.0
sigma_minus_weight = 1.0
source_citation = "test"
"#;

    #[test]
    fn bad_branch_weights_rejected() {
        let err = load_species(MINIMAL).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("sum to")), "{err}");
    }

    #[test]
    fn fixed_weights_accepted() {
        let doc = MINIMAL.replace("pi_weight = 0.5", "pi_weight = 0.6");
        let species = load_species(&doc).unwrap();
        assert_eq!(species.len(), 1);
        assert_eq!(species[0].charge, 1);
        assert!(species[0].d52_lifetime.is_none());
    }

    #[test]
    fn unknown_key_named_in_error() {
        let doc = MINIMAL.replace("mass_amu = 40.0", "mass_amu = 40.0\ncolour = \"red\"");
        match load_species(&doc).unwrap_err() {
            Error::Parse { key, .. } => assert_eq!(key, "colour"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_key_named_in_error() {
        let doc = MINIMAL.replace("mass_amu = 40.0", "");
        match load_species(&doc).unwrap_err() {
            Error::Parse { key, .. } => assert_eq!(key, "mass_amu"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn both_frequency_keys_rejected() {
        let doc = MINIMAL.replace("omega_rad_s = 1.0e16", "omega_rad_s = 1.0e16\nwavelength_nm = 188.0");
        match load_species(&doc).unwrap_err() {
            Error::Parse { key, .. } => assert!(key.ends_with("wavelength_nm"), "{key}"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_sp_group_rejected() {
        let doc = MINIMAL
            .replace("pi_weight = 0.5", "pi_weight = 0.6")
            .replace("upper = \"4P1/2\"", "upper = \"5D3/2\"")
            .replace("upper = \"4P3/2\"", "upper = \"5D5/2\"");
        let err = load_species(&doc).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("S-P")), "{err}");
    }

    #[test]
    fn stored_lifetime_must_match() {
        let mut doc = builtin_species("Ca40+").map(|s| serialize_species(&s)).unwrap();
        doc = doc.replace("d52_lifetime_s = ", "d52_lifetime_s = 2.0\n# ");
        let err = load_species(&doc).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("lifetime")), "{err}");
    }

    #[test]
    fn wavelength_converts_exactly() {
        let species = builtin_species("Ca40+").unwrap();
        let line = &species.transitions[0];
        assert_eq!(line.angular_frequency, omega_from_wavelength(396.959 * 1e-9));
    }

    #[test]
    fn multi_species_document() {
        let ca = serialize_species(&builtin_species("Ca40+").unwrap());
        let sr = serialize_species(&builtin_species("Sr88+").unwrap());
        let indent = |s: &str| s.replace("[[lines]]", "[[species.lines]]");
        let doc = format!("[[species]]\n{}\n[[species]]\n{}", indent(&ca), indent(&sr));
        let all = load_species(&doc).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1].name, "Sr88+");
    }

    proptest! {
        #[test]
        fn round_trip_preserves_species(idx in 0usize..3, scale in 0.5f64..2.0) {
            let mut species = crate::atomic_data::builtin_species_all()[idx].clone();
            for line in &mut species.transitions {
                line.decay_rate *= scale;
            }
            species.d52_lifetime = species.derived_d52_lifetime();
            let text = serialize_species(&species);
            let back = load_species(&text).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(&back[0], &species);
        }
    }
}
