use std::sync::OnceLock;

use super::{load_species, IonSpecies};
use crate::error::{Error, Result};

const EMBEDDED: [&str; 3] = [
    include_str!("../../data/ca40.toml"),
    include_str!("../../data/sr88.toml"),
    include_str!("../../data/ba138.toml"),
];

fn registry() -> &'static [IonSpecies] {
    static REGISTRY: OnceLock<Vec<IonSpecies>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        EMBEDDED
            .iter()
            .flat_map(|doc| load_species(doc).expect("embedded species data is valid"))
            .collect()
    })
}

pub fn builtin_names() -> Vec<String> {
    registry().iter().map(|s| s.name.clone()).collect()
}

pub fn builtin_species_all() -> Vec<IonSpecies> {
    registry().to_vec()
}

/// Embedded species record by name (`Ca40+`, `Sr88+`, `Ba138+`; case-insensitive).
pub fn builtin_species(name: &str) -> Result<IonSpecies> {
    registry()
        .iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .cloned()
        .ok_or_else(|| Error::NotFound { name: name.to_string(), available: builtin_names() })
}
